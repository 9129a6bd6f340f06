"""Simulator and verification toolkit for the shuffled Simon's problem."""

from .errors import (BsspError, ContractViolation, DepthBudgetError,
                     OracleConstructionError, ResourceError)
from .gf2 import (AffineEquation, BitWord, SolveOutcome, gf2_dot,
                  solve_affine_system)
from .sampling import (MODE_INJECTIVE, MODE_SIMON, Permutation,
                       SimonsInstance, sample_injective_function,
                       sample_instance, sample_permutation,
                       sample_simons_function)
from .seeding import SeedSpec, derive_seed, rng_from
from .shuffling import (BijectiveShuffling, Shuffling,
                        build_bijective_shuffling, build_shuffling,
                        embed_width)
from .hiding import (FlagPredicates, HiddenSets, ShadowOracle, build_shadow,
                     flags_from_shadow, resample_hidden_slice,
                     sample_hidden_chain, sample_hidden_sets,
                     semiclassical_flag_sets, slice_levels)
from .unitary import OracleUnitary, complete_permutation, oracle_unitary
from .engine import (CNOT, DenseState, Field, FieldSpec, GateLayer, H,
                     RegisterLayout, SparseState, State, U1, U2,
                     apply_semiclassical_toggle, find_probability)
from .metrics import bures, bures_pure, fidelity, fidelity_pure
from .schemes import (BsspOracle, BsspResult, SchemeSpec, SchemeTranscript,
                      Stage, run_bssp_decision, run_bssp_search,
                      run_cq_scheme, run_depth_sweep, run_qc_scheme,
                      sample_bssp_oracle, search_binding, search_layout,
                      shadow_bssp_oracle)
from .serialize import (RunManifest, read_oracle_bundle, write_oracle_bundle)
from .verify import (BfpReport, O2hRecord, O2hReport, check_bfp,
                     check_o2h_single, estimate_o2h_expectation,
                     shadow_indistinguishability_experiment)

__version__ = "0.1.0"
