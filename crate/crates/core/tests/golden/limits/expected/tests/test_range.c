/* Generated by statetest 0.1.0. Do not edit. */

#include <stdio.h>
#include <stdlib.h>
#include "src-gen/sc_types.h"
#include "src-gen/Range.h"

static int checks = 0;
static int failures = 0;

#define EXPECT_TRUE(cond) \
    do { \
        checks++; \
        if (!(cond)) { \
            failures++; \
            printf("%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
        } \
    } while (0)

int main(void)
{
    Range handle;

    range_init(&handle);
    range_enter(&handle);

    EXPECT_TRUE(range_isActive(&handle, range_main_region_Low));

    rangeIfaceRange_set_level(&handle, 0);
    EXPECT_TRUE(range_isActive(&handle, range_main_region_Mid));

    rangeIfaceRange_set_level(&handle, (-2147483647 - 1));
    EXPECT_TRUE(range_isActive(&handle, range_main_region_Low));

    rangeIfaceRange_set_level(&handle, 2147483647);
    EXPECT_TRUE(range_isActive(&handle, range_main_region_High));

    rangeIfaceRange_set_level(&handle, 5);
    EXPECT_TRUE(range_isActive(&handle, range_main_region_High));

    rangeIfaceRange_set_armed(&handle, true);
    EXPECT_TRUE(range_isActive(&handle, range_main_region__final_));

    rangeIfaceRange_set_level(&handle, 1);
    EXPECT_TRUE(range_isActive(&handle, range_main_region__final_));

    printf("%d checks, %d failures\n", checks, failures);
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
