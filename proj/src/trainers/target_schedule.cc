#include "marl/trainers/target_schedule.h"
