#include <stdio.h>
#include <string.h>

#include "wbk.h"

static int expect(int ok, const char *what) {
    if (!ok) {
        const char *err = wbk_last_error();
        fprintf(stderr, "%s failed: %s\n", what, err ? err : "(no message)");
    }
    return ok ? 0 : 1;
}

int main(void) {
    int bad = 0;
    char *s = NULL;

    bad += expect(wbk_bundle_dim("L20E", 3, &s) == WBK_STATUS_OK && strcmp(s, "14") == 0, "dim");
    wbk_string_free(s);

    bad += expect(wbk_minimal_eigenvalue(1, 2, 1, WBK_RANK_GENERIC, &s) == WBK_STATUS_OK
                      && strcmp(s, "1/(2*(n+2))") == 0,
                  "bound");
    wbk_string_free(s);

    WbkDatabase *db = NULL;
    bad += expect(wbk_database_builtin(&db) == WBK_STATUS_OK, "database");
    bad += expect(wbk_derive(db, "wbf4", 2, &s) == WBK_STATUS_DOMAIN && wbk_last_error() != NULL, "n_min");

    const char *ids[] = {"eq3", "eq4"};
    WbkReport *report = NULL;
    bad += expect(wbk_verify(db, ids, 2, 2, 8, &report) == WBK_STATUS_OK, "verify");
    bad += expect(wbk_report_len(report) == 2 && wbk_report_all_pass(report), "report");
    bad += expect(wbk_report_render(report, WBK_FORMAT_LATEX, &s) == WBK_STATUS_OK
                      && strstr(s, "\\begin{longtable}") != NULL,
                  "render");
    wbk_string_free(s);
    wbk_report_free(report);
    wbk_database_free(db);

    bad += expect(wbk_database_from_json("not json", &db) == WBK_STATUS_DOMAIN, "bad json");
    return bad;
}
