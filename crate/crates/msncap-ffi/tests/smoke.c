#include <stdio.h>
#include "msncap.h"

int main(void) {
    size_t pairs[] = {1, 2, 1, 3, 2, 3};
    MsnNetwork *net = NULL;
    if (msn_network_new(3, pairs, 3, true, &net) != MSN_STATUS_OK) {
        fprintf(stderr, "%s\n", msn_last_error());
        return 1;
    }
    uint64_t p = 0, q = 0;
    if (msn_network_capacity(net, false, &p, &q) != MSN_STATUS_OK) return 1;
    printf("%llu/%llu\n", (unsigned long long)p, (unsigned long long)q);

    uint64_t counts[3];
    size_t written = 0;
    if (msn_network_deliveries(net, counts, 3, &written) != MSN_STATUS_OK) return 1;
    printf("%llu %llu %llu\n", (unsigned long long)counts[0], (unsigned long long)counts[1],
           (unsigned long long)counts[2]);
    msn_network_free(net);

    double value = 0.0;
    char *exact = NULL;
    if (msn_formula("max4", 5, 0, &value, &exact) != MSN_STATUS_OK) return 1;
    printf("max4(5) = %s\n", exact);
    msn_string_free(exact);
    return 0;
}
