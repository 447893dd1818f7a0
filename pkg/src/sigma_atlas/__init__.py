"""Tools for mapping where power series with restricted coefficients
can vanish inside the unit disc."""

__version__ = "0.1.0"

from .coeffset import (CoefficientSet, ConnGraph, ConnectednessReport,
                       classify_connectedness, connectivity_graph,
                       difference_set, is_symmetric, make_set, normalize,
                       span_set, total_gap)
from .decide import (Decision, SearchConfig, decide_exact_quadratic,
                     decide_point, replay_exact_witness,
                     witness_bounded_greedy, witness_real_interval)
from .errors import (AtlasError, BudgetExceeded, DegenerateDenominator,
                     EmptyRootSet, GreedyFailed, NoNormalization,
                     PreconditionViolated, RootFindingFailure, SingletonSet,
                     SpecMismatch)
from .geometry import (DepthReport, Gap3Report, QuasiRigidityReport,
                       RigidityReport, SpikeBand, depth_report,
                       gap3_disconnection_candidate, outer_annulus_bound,
                       quasi_probe_shift, quasirigidity_probe,
                       rho_out_bounds, rho_theta_lower, rigidity_probe_root,
                       rigidity_scan, spike_bands)
from .oracle import (CrossCheckReport, OracleRootSet,
                     ProductInequalityReport, cross_check_decide,
                     enumerate_roots, family_size, min_modulus_nonreal,
                     verify_product_inequality, write_roots_csv)
from .recursion import (Candidate, escape_threshold_angled,
                        escape_threshold_one_step, escape_threshold_two_step,
                        polynomial_root_check, step_one, step_two)
from .render import (ComponentLabeling, Raster, RasterSpec, Shortcuts,
                     components, count_spikes, diff, read_pgm, render,
                     spike_presence, spike_tips, write_pgm)
