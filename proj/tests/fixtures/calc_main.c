#include <stdio.h>

int calc_depth = 0;

int main(void) {
    int status = calc_parse();
    printf("parse status %d at depth %d\n", status, calc_depth);
    return status;
}
