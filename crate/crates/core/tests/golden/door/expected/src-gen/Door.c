/* Generated by statetest 0.1.0. Do not edit. */

#include "Door.h"

static void door_take(Door* handle, DoorStates target)
{
    handle->active = target;
    if (target == door_main_region__final_)
    {
        handle->status = door_status_finalized;
    }
}

static sc_boolean door_select(const Door* handle, DoorStates* target)
{
    switch (handle->active)
    {
    case door_main_region_Closed:
        if (handle->iface.locked && (handle->iface.attempts >= 3))
        {
            *target = door_main_region_Jammed;
            return true;
        }
        break;
    case door_main_region_Jammed:
        if ((!handle->iface.locked) || (handle->iface.attempts == 0))
        {
            *target = door_main_region_Closed;
            return true;
        }
        break;
    default:
        break;
    }
    return false;
}

static void door_complete(Door* handle, sc_integer steps)
{
    DoorStates target = handle->active;
    while (handle->status == door_status_running && door_select(handle, &target))
    {
        if (steps == DOOR_MICROSTEP_LIMIT)
        {
            handle->status = door_status_faulted;
            return;
        }
        door_take(handle, target);
        steps++;
    }
}

void door_init(Door* handle)
{
    handle->active = door_main_region_Closed;
    handle->status = door_status_ready;
    handle->iface.locked = false;
    handle->iface.attempts = 0;
}

void door_enter(Door* handle)
{
    if (handle->status != door_status_ready)
    {
        return;
    }
    handle->iface.locked = false;
    handle->iface.attempts = 0;
    handle->active = door_main_region_Closed;
    handle->status = door_status_running;
    door_complete(handle, 0);
}

sc_boolean door_isActive(const Door* handle, DoorStates state)
{
    return handle->status != door_status_ready && handle->active == state;
}

sc_boolean door_isFinal(const Door* handle)
{
    return handle->status == door_status_finalized;
}

sc_boolean door_isFaulted(const Door* handle)
{
    return handle->status == door_status_faulted;
}

void doorIfaceDoor_set_locked(Door* handle, sc_boolean value)
{
    if (handle->status != door_status_running)
    {
        return;
    }
    handle->iface.locked = value;
    door_complete(handle, 0);
}

sc_boolean doorIfaceDoor_get_locked(const Door* handle)
{
    return handle->iface.locked;
}

void doorIfaceDoor_set_attempts(Door* handle, sc_integer value)
{
    if (handle->status != door_status_running)
    {
        return;
    }
    handle->iface.attempts = value;
    door_complete(handle, 0);
}

sc_integer doorIfaceDoor_get_attempts(const Door* handle)
{
    return handle->iface.attempts;
}

void doorIfaceDoor_raise_push(Door* handle)
{
    if (handle->status != door_status_running)
    {
        return;
    }
    switch (handle->active)
    {
    case door_main_region_Open:
        door_take(handle, door_main_region_Closed);
        door_complete(handle, 1);
        return;
    default:
        break;
    }
}

void doorIfaceDoor_raise_pull(Door* handle)
{
    if (handle->status != door_status_running)
    {
        return;
    }
    switch (handle->active)
    {
    case door_main_region_Closed:
        if (!handle->iface.locked)
        {
            door_take(handle, door_main_region_Open);
            door_complete(handle, 1);
            return;
        }
        break;
    default:
        break;
    }
}
