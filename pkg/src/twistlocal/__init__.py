"""Local solvability of polyquadratic Atkin-Lehner twists of X0(N).

The package decides, prime by prime, whether a twisted modular curve can have
local points, enumerates twist tuples that survive everywhere, runs the
admissible-prime density experiment, and carries the cuspidal-group and
Mordell-Weil sieve utilities. `twistlocal.cli` is the command line front end
and `twistlocal.service` the HTTP face of the same operations.
"""

from .classpoly import (
    ClassPolyCache,
    HilbertClassPoly,
    class_number,
    default_cache,
    has_root_mod_p,
    has_simple_root_mod_p,
    hilbert_class_poly,
    reduced_forms,
)
from .errors import (
    BoundExceededError,
    DispatchError,
    DomainError,
    PrecisionError,
    PreflightError,
    SpecError,
    TwistLocalError,
)
from .localpoints import (
    EverywhereLocal,
    InertProfile,
    PrimeVerdict,
    Status,
    TwistSpec,
    everywhere_local,
    inert_profile,
    verdict_at_prime,
    verdict_bad,
    verdict_good_ramified,
    verdict_good_unramified,
)
from .ntkernel import (
    Factorization,
    SplitType,
    factor,
    genus_x0,
    is_prime,
    is_squarefree,
    kronecker_symbol,
    primes_below,
    splitting,
)
from .picard import (
    CuspidalModel,
    Pic1Status,
    Pic1Verdict,
    SieveData,
    SieveOutcome,
    cusp_order_composite,
    cusp_order_prime,
    mw_sieve_check,
    parse_sieve_data,
    pic1_verdict_composite,
    pic1_verdict_prime,
    solve_cuspidal_relations,
)
from .twistsearch import (
    AlphaSample,
    DensityReport,
    PreflightCheck,
    SearchConfig,
    SearchDiagnostics,
    SearchHit,
    chebotarev_sample,
    count_admissible_twists,
    density_preflight,
    is_admissible_prime,
    search_twists,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaSample",
    "BoundExceededError",
    "ClassPolyCache",
    "CuspidalModel",
    "DensityReport",
    "DispatchError",
    "DomainError",
    "EverywhereLocal",
    "Factorization",
    "HilbertClassPoly",
    "InertProfile",
    "Pic1Status",
    "Pic1Verdict",
    "PrecisionError",
    "PreflightCheck",
    "PreflightError",
    "PrimeVerdict",
    "SearchConfig",
    "SearchDiagnostics",
    "SearchHit",
    "SieveData",
    "SieveOutcome",
    "SpecError",
    "SplitType",
    "Status",
    "TwistLocalError",
    "TwistSpec",
    "chebotarev_sample",
    "class_number",
    "count_admissible_twists",
    "cusp_order_composite",
    "cusp_order_prime",
    "default_cache",
    "density_preflight",
    "everywhere_local",
    "factor",
    "genus_x0",
    "has_root_mod_p",
    "has_simple_root_mod_p",
    "hilbert_class_poly",
    "inert_profile",
    "is_admissible_prime",
    "is_prime",
    "is_squarefree",
    "kronecker_symbol",
    "mw_sieve_check",
    "parse_sieve_data",
    "pic1_verdict_composite",
    "pic1_verdict_prime",
    "primes_below",
    "reduced_forms",
    "search_twists",
    "solve_cuspidal_relations",
    "splitting",
    "verdict_at_prime",
    "verdict_bad",
    "verdict_good_ramified",
    "verdict_good_unramified",
]
