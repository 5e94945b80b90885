#include <stdio.h>
#include <string.h>

#include "minlab.h"

#define CHECK(call)                                                          \
    do {                                                                     \
        MinlabStatus st_ = (call);                                           \
        if (st_ != MINLAB_STATUS_OK) {                                       \
            fprintf(stderr, "%s -> %d: %s\n", #call, st_, minlab_last_error()); \
            return 1;                                                        \
        }                                                                    \
    } while (0)

int main(void) {
    size_t count = 0;
    CHECK(minlab_dag_count(3, &count));
    if (count != 25) return 2;
    CHECK(minlab_class_count(3, &count));
    if (count != 11) return 3;
    if (minlab_dag_count(9, &count) != MINLAB_STATUS_CAP_EXCEEDED) return 4;
    if (strstr(minlab_last_error(), "543") == NULL) return 5;

    size_t cards[2] = {2, 2};
    double probs[4] = {0.5, 0.0, 0.0, 0.5};
    MinlabTable *t = NULL;
    CHECK(minlab_table_new(cards, 2, probs, 4, &t));
    double l1 = 0.0;
    CHECK(minlab_l1_stat(t, 1u, 2u, 0u, &l1));
    if (l1 != 1.0) return 6;

    MinlabSample *s = NULL;
    CHECK(minlab_sample_draw(t, 10000, 7, &s));
    MinlabLearner *l = NULL;
    CHECK(minlab_learner_new(2, -1, 1.0, &l));
    size_t cls = 99;
    CHECK(minlab_learner_learn(l, s, &cls));
    if (cls == 0) return 7; /* class 0 is the empty graph; the pair is dependent */

    minlab_learner_free(l);
    minlab_sample_free(s);
    minlab_table_free(t);
    puts("ok");
    return 0;
}
