"""Star collisions, units and star-dependent spectra of random k-uniform hypergraphs."""

__version__ = "0.1.0"

from ._accel import BACKEND
from .collisions import (CollisionCensus, LimitLaw, Unit, UnitPartition, build_partition,
                         census, expected_isolated, expected_triples_exact,
                         expected_Xr_asymptotic, expected_Xr_exact, limit_parameters)
from .errors import (CapacityError, ConvergenceError, HypergraphError, HyperstarError,
                     KernelError, PartitionError, PreconditionError, RegimeError)
from .hypergraph import (Hypergraph, VertexStar, codegree, new_hypergraph, parse_hg,
                         read_hg, serialize_hg, star, write_hg)
from .montecarlo import (ExperimentPlan, ExperimentSummary, poisson_pmf, run_experiment,
                         tv_distance, x0_limit_pmf)
from .sampler import (FixedLambda, FixedP, HalfLogLogPlusW, LogPlusC, SampleConfig, binom,
                      derive_seed, edge_probability, log_binom, parse_regime, rank_kset,
                      sample, unrank_kset)
from .spectral import (SpectralSplitReport, esd_kolmogorov, propagate, spectral_split_check,
                       symmetric_eigenvalues, unit_sync_preserved)
from .star_matrix import (KERNELS, StarKernel, StarMatrix, UnitContraction, build_matrix,
                          lift, local_basis, quotient, unit_eigenvalues, verify_equitable)
