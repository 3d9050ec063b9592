/* Mode handling for the cruise controller. */
#include "modes.h"

int selectGear(int mode)
{
    switch (mode) {
    case 0:
        return 1;
    case 1:
        return 2;
    default:
        return 0;
    }
}

void applyLimit(int *target, int kind, int level)
{
    if (level > 3) {
        level = 3;
    }
    switch (kind) {
    case 7:
        *target = level * 2;
        break;
    case 8:
        *target = -level;
        break;
    }
}

const char *modeName(int code)
{
    const char *name = "unknown";
    while (code > 9) {
        code /= 10;
    }
    switch (code) {
    case 1: name = "eco"; break;
    case 2:
        if (code * 3 == 6) {
            name = "sport";
        }
        break;
    default:
        break;
    }
    return name;
}
