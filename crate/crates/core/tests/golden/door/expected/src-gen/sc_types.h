/* Generated by statetest 0.1.0. Do not edit. */

#ifndef SC_TYPES_H_
#define SC_TYPES_H_

#include <stdint.h>
#include <stdbool.h>

typedef int32_t sc_integer;
typedef bool sc_boolean;

#endif /* SC_TYPES_H_ */
