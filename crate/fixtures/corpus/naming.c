/* Wheel speed computation. */
static int lastTicks;
static int tickCount;

int computeSpeed(int wheelTicks, int sampleTime)
{
    int deltaTicks = wheelTicks - lastTicks;
    int speed_value = deltaTicks * 100 / sampleTime;
    lastTicks = wheelTicks;
    tickCount++;
    return speed_value;
}

int averageSpeed(int totalSpeed, int sampleCount)
{
    return totalSpeed / sampleCount;
}
