/* Generated by statetest 0.1.0. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>
#include <stdio.h>
#include <stdlib.h>
#include "alloc_doubles.h"

typedef enum
{
    alloc_mode_off,
    alloc_mode_always,
    alloc_mode_count,
    alloc_mode_region
} alloc_double_mode;

/* Not thread-safe: meant for single-threaded test binaries. */
static struct
{
    alloc_double_mode mode;
    long remaining; /* calls under count, depth under region */
} alloc_doubles[alloc_double_count];

int set_status(alloc_double_id id, int n)
{
    if ((unsigned)id >= (unsigned)alloc_double_count) {
        return DOUBLES_UNKNOWN_FUNCTION;
    }
    if (n < -1) {
        return DOUBLES_BAD_COUNT;
    }
    alloc_doubles[id].mode = n == -1 ? alloc_mode_always : n == 0 ? alloc_mode_off : alloc_mode_count;
    alloc_doubles[id].remaining = n > 0 ? n : 0;
    return DOUBLES_OK;
}

int region_enter(alloc_double_id id)
{
    if ((unsigned)id >= (unsigned)alloc_double_count) {
        return DOUBLES_UNKNOWN_FUNCTION;
    }
    if (alloc_doubles[id].mode == alloc_mode_region) {
        alloc_doubles[id].remaining++;
    } else {
        alloc_doubles[id].mode = alloc_mode_region;
        alloc_doubles[id].remaining = 1;
    }
    return DOUBLES_OK;
}

int region_exit(alloc_double_id id)
{
    if ((unsigned)id >= (unsigned)alloc_double_count) {
        return DOUBLES_UNKNOWN_FUNCTION;
    }
    if (alloc_doubles[id].mode != alloc_mode_region || alloc_doubles[id].remaining == 0) {
        return DOUBLES_REGION_UNDERFLOW;
    }
    alloc_doubles[id].remaining--;
    return DOUBLES_OK;
}

void alloc_doubles_reset(void)
{
    size_t i;
    for (i = 0; i < (size_t)alloc_double_count; i++) {
        alloc_doubles[i].mode = alloc_mode_off;
        alloc_doubles[i].remaining = 0;
    }
}

static bool alloc_consume(alloc_double_id id)
{
    switch (alloc_doubles[id].mode) {
    case alloc_mode_always:
        return true;
    case alloc_mode_count:
        if (--alloc_doubles[id].remaining == 0) {
            alloc_doubles[id].mode = alloc_mode_off;
        }
        return true;
    case alloc_mode_region:
        return alloc_doubles[id].remaining > 0;
    case alloc_mode_off:
    default:
        return false;
    }
}

void *__real_malloc(size_t size);
void *__wrap_malloc(size_t size);

void *__wrap_malloc(size_t size)
{
    if (alloc_consume(_malloc)) {
        return NULL;
    } else {
        return __real_malloc(size);
    }
}

void *__real_calloc(size_t count, size_t size);
void *__wrap_calloc(size_t count, size_t size);

void *__wrap_calloc(size_t count, size_t size)
{
    if (alloc_consume(_calloc)) {
        return NULL;
    } else {
        return __real_calloc(count, size);
    }
}

FILE *__real_fopen(const char *path, const char *mode);
FILE *__wrap_fopen(const char *path, const char *mode);

FILE *__wrap_fopen(const char *path, const char *mode)
{
    if (alloc_consume(_fopen)) {
        (void)path;
        (void)mode;
        return NULL;
    } else {
        return __real_fopen(path, mode);
    }
}
