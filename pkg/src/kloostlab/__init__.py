"""kloostlab: a numerical laboratory for the distribution of modular inverses
and multiples in residue windows, and for Sato-Tate statistics of Kloosterman
sum angles averaged over short parameter intervals.

Every optimized computation has a brute-force counterpart in
:mod:`kloostlab.oracle`; the test suite cross-checks the two.
"""

from .counting import (
    DeviationReport,
    SampleSet,
    Window,
    count_inverse_window,
    count_multiple_coprime_window,
    count_multiple_window,
    exceptional_count,
    expected_inverse,
    expected_multiple,
    variance_sum_inverse,
    variance_sum_multiple,
    window_histogram,
)
from .kloosterman import (
    KloostermanTable,
    NumericIntegrityError,
    TableSource,
    WeilViolationError,
    angle,
    kloosterman_all,
    kloosterman_sum,
    load_table,
    reduce_pair,
    save_table,
)
from .modmath import (
    PrimeList,
    NotInvertibleError,
    coprime_count_interval,
    e_m,
    egcd,
    euler_phi,
    mod_inverse,
    primes_up_to,
    primitive_root,
)
from .satotate import (
    AngleWindow,
    STStats,
    angle_set_count,
    bound_theorem3,
    bound_theorem4,
    bound_theorem5,
    collect_stats,
    delta_dispersion,
    discrepancy,
    mu_st,
    pair_counts,
    pi_average,
    pi_rs,
    q_count,
)

__version__ = "0.1.0"
