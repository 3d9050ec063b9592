/* Output stage of the brake controller. */
static void brakeInit(void) { }

static int capPressure(int value, int bound)
{
    if (value > bound) {
        value = bound;
    }
    value++;
    return value;
}

int brakeReady;
