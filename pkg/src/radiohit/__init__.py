"""Radio network simulator, hitting-game engine and the reductions between them."""

from .algorithms import (ProbabilitySchedule, cd_binary_search_wakeup, decay_broadcast, decay_wakeup,
                         multichannel_wakeup, resolve_algorithm, uniform_wakeup, willard_wakeup)
from .families import (FamilyCertificate, SetFamily, all_pairs_family, family_hits, find_unhit_pair,
                       min_hitting_family_size, sample_candidate_family, signature, verify_hit_fraction)
from .game import (GameTranscript, HittingInstance, MultiHittingConfig, Reveal, hits, play, play_multi,
                   uniform_family_referee)
from .model import (ExecutionTrace, ModelConfig, NodeAction, Observation, Topology, resolve_round,
                    run_broadcast, run_wakeup)
from .tape import RandomTape

__version__ = "0.1.0"
