#include <stdio.h>
#include <string.h>

#include "acs.h"

int main(void) {
    AcsFixture *fx = NULL;
    if (acs_fixture_builtin("so3", &fx) != ACS_STATUS_OK) {
        fprintf(stderr, "load: %s\n", acs_last_error());
        return 1;
    }
    char *json = NULL;
    if (acs_cohomology(fx, &json) != ACS_STATUS_OK || strstr(json, "[1,0,0,1]") == NULL) {
        fprintf(stderr, "cohomology: %s\n", json ? json : acs_last_error());
        return 1;
    }
    acs_string_free(json);
    if (acs_evaluate(fx, ACS_FORM_KIND_TRANSGRESSION, "ad,gamma", 2, 2, 5, &json) != ACS_STATUS_OK) {
        fprintf(stderr, "transgression: %s\n", acs_last_error());
        return 1;
    }
    acs_string_free(json);
    if (acs_fixture_builtin("missing", &fx) != ACS_STATUS_INVALID_ARGUMENT || acs_last_error() == NULL) {
        return 1;
    }
    acs_fixture_free(fx);
    printf("ok %s\n", acs_version());
    return 0;
}
