from robustlink import verify


def test_suites_pass_at_small_scale():
    for res in verify.run_all(seed=1, scale=0.1):
        assert res.passed, (res.name, res.failures[:3])


def test_attacker_diagnostics_columns():
    res = verify.attacker_suite(9, seed=2)
    assert res.passed and len(res.diagnostics) == 9
    for row in res.diagnostics:
        assert row["linkdel_similarity"] == row["min_similarity"]
        assert row["gap"] == row["damage_exact"] - row["damage_independent"]


def test_summary_format():
    res = verify.SuiteResult("x", 4, [("bad",)])
    assert not res.passed and res.summary() == "FAIL x: 3/4"
    assert not verify.SuiteResult("empty").passed
