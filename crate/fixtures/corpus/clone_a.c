/* Output stage of the throttle controller. */
double throttleGain = 0.5;

static int limitOutput(int raw, int limit)
{
    if (raw > limit) {
        raw = limit;
    }
    raw++;
    return raw;
}

void resetThrottle(void) { throttleGain = 0.5; }
