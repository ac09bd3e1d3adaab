"""Search and density tests.

The (13, 2) search fixture and the density trajectory numbers were frozen
from exhaustive runs; the alpha estimate for a degree-one class polynomial
has a clean theoretical target (half the primes satisfy one quadratic
condition) and is checked against it rather than against itself.
"""

import pytest

from twistlocal.errors import DomainError, PreflightError, SpecError
from twistlocal.localpoints import Status, TwistSpec, everywhere_local
from twistlocal.classpoly import has_root_mod_p
from twistlocal.ntkernel import kronecker_symbol, primes_below
from twistlocal.twistsearch import (
    AlphaSample,
    DensityReport,
    SearchConfig,
    SearchDiagnostics,
    SearchHit,
    chebotarev_sample,
    count_admissible_twists,
    density_preflight,
    is_admissible_prime,
    search_twists,
)

D1 = 23616331489


class TestSearchConfig:
    def test_valid(self):
        cfg = SearchConfig((13, 2), 500, limit=3)
        assert cfg.m == (13, 2) and cfg.bound == 500 and cfg.limit == 3

    @pytest.mark.parametrize("m", [(6, 2), (4,), (1,), ()])
    def test_bad_level(self, m):
        with pytest.raises(SpecError):
            SearchConfig(m, 100)

    def test_bad_bound(self):
        with pytest.raises(DomainError):
            SearchConfig((26,), 1)

    def test_bad_limit(self):
        with pytest.raises(DomainError):
            SearchConfig((26,), 100, limit=0)


class TestSearch:
    def test_two_field_fixture(self):
        diag = SearchDiagnostics()
        hits = list(search_twists(SearchConfig((13, 2), 500), diag))
        assert [h.d for h in hits] == [(-263, 313), (313, -263)]
        assert all(h.verdict == "Yes" for h in hits)
        assert diag.emitted == 2
        assert diag.suppressed == 0

    def test_single_field(self):
        diag = SearchDiagnostics()
        hits = list(search_twists(SearchConfig((26,), 100), diag))
        ds = [h.d for h in hits]
        assert (-23,) in ds
        assert (-29,) not in ds  # 2 ramifies in Q(sqrt(-29)), filtered up front
        assert diag.suppressed == 0

    def test_emitted_tuples_verify(self):
        for hit in search_twists(SearchConfig((13, 2), 500)):
            agg = everywhere_local(TwistSpec((13, 2), hit.d))
            assert agg.status is Status.YES

    def test_limit(self):
        hits = list(search_twists(SearchConfig((13, 2), 500, limit=1)))
        assert [h.d for h in hits] == [(-263, 313)]

    def test_no_repeated_value_across_coordinates(self):
        # equal coordinates share every prime (or multiply to a square), so
        # no emitted tuple may repeat a value
        for hit in search_twists(SearchConfig((13, 2), 350)):
            assert len(set(hit.d)) == len(hit.d)

    def test_digest_stable(self):
        a = [h.trace_digest for h in search_twists(SearchConfig((13, 2), 500))]
        b = [h.trace_digest for h in search_twists(SearchConfig((13, 2), 500))]
        assert a == b
        assert all(len(x) == 12 for x in a)

    def test_hit_json(self):
        (hit, _) = list(search_twists(SearchConfig((13, 2), 500)))
        obj = hit.to_json()
        assert obj["d"] == [-263, 313] and obj["verdict"] == "Yes"


class TestAdmissiblePrimes:
    def test_degree_one_polynomial(self):
        # H(-8) is linear, so only the quadratic condition on d1 = 5 bites
        assert [p for p in primes_below(50) if is_admissible_prime(2, 5, p)] == [11, 19, 29, 31, 41]

    def test_degree_two_polynomial(self):
        got = [p for p in primes_below(100) if is_admissible_prime(13, D1, p)]
        assert got == [17, 23, 29, 43, 53, 61, 79]

    def test_multiple_root_primes_are_excluded(self):
        # 2, 3, 5, 13 and 41 divide the discriminant of H(-52); the class
        # polynomial has only a double root there, which certifies nothing.
        # 41 is the dangerous one: it is inert over sqrt(13), so counting it
        # would admit twist values with no 13-adic points.
        for p in (2, 3, 5, 13, 41):
            assert has_root_mod_p(-52, p)
            assert not is_admissible_prime(13, D1, p)
        assert kronecker_symbol(13, 41) == -1

    def test_alpha_half_for_single_condition(self):
        s = chebotarev_sample(2, 5, 10**5)
        assert s.primes == 9592
        assert abs(s.alpha_hat - 0.5) < 0.02

    def test_sample_bound_enforced(self):
        with pytest.raises(DomainError):
            chebotarev_sample(2, 5, 50_000)

    def test_sample_validates_inputs(self):
        with pytest.raises(DomainError):
            chebotarev_sample(4, 5, 10**5)
        with pytest.raises(DomainError):
            chebotarev_sample(2, 0, 10**5)


class TestPreflight:
    def test_all_pass(self):
        checks = density_preflight(5, 13, D1)
        assert len(checks) == 7
        assert all(c.ok for c in checks)

    def test_factor_congruence(self):
        failing = {c.name for c in density_preflight(7, 13, D1) if not c.ok}
        assert "level factors are distinct primes congruent to 1 mod 4" in failing

    def test_mod_eight(self):
        failing = {c.name for c in density_preflight(5, 17, D1) if not c.ok}
        assert "level factors agree mod 8" in failing

    def test_square_conditions(self):
        failing = {c.name for c in density_preflight(5, 29, 41) if not c.ok}
        assert "first twist value is a square modulo both level factors" in failing
        assert "minus twice the first level factor is a square modulo the second" in failing

    def test_composite_d1(self):
        failing = {c.name for c in density_preflight(5, 13, 15) if not c.ok}
        assert "first twist value is a positive prime" in failing
        # the root check cannot run without a prime modulus and must not crash
        assert any(name.startswith("class polynomial") for name in failing)

    def test_small_prime_splitting(self):
        failing = {c.name for c in density_preflight(5, 13, 7) if not c.ok}
        assert "every prime below 4*genus^2 splits in the first twist field" in failing


class TestCountAdmissible:
    def test_frozen_run(self):
        count, rep = count_admissible_twists(5, 13, D1, 10**5)
        assert count == 1605
        assert rep.counts == ((10_000, 191), (33_333, 581), (100_000, 1605))
        assert rep.smallest == (17, 29, 53, 61, 101, 181, 233, 269, 337, 373)
        assert rep.sample_bound == 10**5
        assert abs(rep.alpha_hat - 0.252085) < 5e-6

    def test_counts_nondecreasing(self):
        _, rep = count_admissible_twists(5, 13, D1, 10**5)
        xs = [x for x, _ in rep.counts]
        cs = [c for _, c in rep.counts]
        assert xs == sorted(xs)
        assert cs == sorted(cs)

    def test_members_are_admissible_values(self):
        _, rep = count_admissible_twists(5, 13, D1, 10**5)
        for n in rep.smallest:
            assert n % 4 == 1 and n > 1
            for q in (5, 13):
                assert n % q != 0

    def test_csv(self):
        _, rep = count_admissible_twists(5, 13, D1, 10**5)
        lines = rep.to_csv().strip().splitlines()
        assert lines[0] == "X,count,c_hat"
        assert lines[1].startswith("10000,191,")
        assert lines[3].startswith("100000,1605,")
        assert len(lines) == 4

    def test_json(self):
        _, rep = count_admissible_twists(5, 13, D1, 10**5)
        obj = rep.to_json()
        assert obj["counts"][-1] == [100_000, 1605]
        assert obj["smallest"][0] == 17

    def test_preflight_failure_raises(self):
        with pytest.raises(PreflightError) as exc:
            count_admissible_twists(7, 13, D1, 10**5)
        assert any(not c.ok for c in exc.value.report)
        assert len(exc.value.report) == 7

    def test_x_too_small(self):
        with pytest.raises(DomainError):
            count_admissible_twists(5, 13, D1, 50)
