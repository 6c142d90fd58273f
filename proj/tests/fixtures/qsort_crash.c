#include <stdlib.h>

struct record {
    const char *name;
    int *score;
};

static int scores[3] = {7, 2, 9};

static int compare_records(const void *a, const void *b) {
    const struct record *ra = a;
    const struct record *rb = b;
    return *ra->score - *rb->score;
}

static struct record *load_records(int count) {
    static const char *names[] = {"ada", "bob", "cy", "dee"};
    struct record *records = calloc(count, sizeof *records);
    for (int i = 0; i < count; i++) {
        records[i].name = names[i];
        records[i].score = i == 2 ? NULL : &scores[i % 3];
    }
    return records;
}

int main(void) {
    int count = 4;
    struct record *records = load_records(count);
    qsort(records, count, sizeof records[0], compare_records);
    return records[0].score == NULL;
}
