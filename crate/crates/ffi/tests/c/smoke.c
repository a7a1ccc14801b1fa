#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qquery.h"

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond, \
              qq_last_error());                                      \
      return 1;                                                      \
    }                                                                \
  } while (0)

int main(void) {
  QqProgram *p = NULL;
  CHECK(qq_program_builtin("ANDOR2", 0.074909, &p) == QQ_STATUS_OK);
  CHECK(qq_program_num_qubits(p) == 3);

  QqReport *r = NULL;
  CHECK(qq_analyze(p, "andor:2", &r) == QQ_STATUS_OK);
  CHECK(fabs(qq_report_p_error_max(r) - 0.287315) < 5e-6);
  QqSidedness s;
  CHECK(qq_report_sidedness(r, &s) == QQ_STATUS_OK);
  CHECK(s == QQ_SIDEDNESS_TWO_SIDED);
  CHECK(qq_report_function_count(r) == 16);

  char *json = NULL;
  CHECK(qq_report_json(r, "builtin:ANDOR2", &json) == QQ_STATUS_OK);
  CHECK(strstr(json, "\"p_error_max\"") != NULL);
  qq_string_free(json);
  qq_report_free(r);

  char *text = NULL;
  CHECK(qq_program_serialize(p, &text) == QQ_STATUS_OK);
  QqProgram *q = NULL;
  CHECK(qq_program_parse(text, &q) == QQ_STATUS_OK);
  qq_string_free(text);
  qq_program_free(q);
  qq_program_free(p);

  CHECK(qq_program_parse("qubits 2\ngate NOPE 0\n", &q) == QQ_STATUS_PARSE);
  CHECK(strlen(qq_last_error()) > 0);

  double t;
  CHECK(qq_threshold(1.0, 1.5, 2, &t) == QQ_STATUS_OK);
  CHECK(fabs(t - 1.0 / 6.0) < 1e-15);
  int64_t num, den;
  CHECK(qq_dfp_worst_case(2, true, &num, &den) == QQ_STATUS_OK);
  CHECK(num == 3 && den == 1);
  printf("ok\n");
  return 0;
}
