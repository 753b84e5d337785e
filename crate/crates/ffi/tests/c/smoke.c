#include <stdio.h>
#include <string.h>
#include "coext.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            const char *e = coext_last_error();                      \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
                    e ? e : "no error");                             \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    CoextStructure *s = NULL;
    CHECK(coext_structure_parse("nodes 3\nmem 0 2\n", &s) == COEXT_STATUS_OK);
    CHECK(coext_structure_len(s) == 3);

    bool b = true;
    CHECK(coext_structure_is_set(s, 2, &b) == COEXT_STATUS_OK && !b);
    CHECK(coext_structure_coext(s, 0, 1, &b) == COEXT_STATUS_OK && b);
    CHECK(coext_structure_is_set(s, 9, &b) == COEXT_STATUS_OUT_OF_RANGE);
    CHECK(coext_last_error() != NULL);

    CoextFormula *f = NULL;
    CHECK(coext_formula_parse("set(x)", &f) == COEXT_STATUS_OK);
    CHECK(coext_eval(s, f, "x=2", &b) == COEXT_STATUS_OK && !b);

    CoextFormula *t = NULL;
    CHECK(coext_formula_translate(f, COEXT_TRANSLATION_EXPAND, &t) == COEXT_STATUS_OK);
    char *text = NULL;
    CHECK(coext_formula_to_string(t, &text) == COEXT_STATUS_OK);
    CHECK(strstr(text, "set(") == NULL);
    coext_string_free(text);

    CoextStructure *q = NULL;
    CHECK(coext_structure_quotient(s, &q) == COEXT_STATUS_OK);
    CHECK(coext_structure_len(q) == 2);

    CoextReport *r = NULL;
    CHECK(coext_check_axiom(s, "extensionality", -1, &r) == COEXT_STATUS_OK);
    CHECK(!coext_report_passed(r));
    CHECK(coext_report_to_string(r, false, &text) == COEXT_STATUS_OK);
    printf("%s\n", text);
    coext_string_free(text);
    coext_report_free(r);

    CHECK(coext_formula_parse(NULL, &t) == COEXT_STATUS_NULL_POINTER);

    coext_formula_free(t);
    coext_formula_free(f);
    coext_structure_free(q);
    coext_structure_free(s);
    puts("ok");
    return 0;
}
