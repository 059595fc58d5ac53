"""Simulation strategies that turn radio algorithms into hitting-game players."""

from .broadcast import (BroadcastMultiHitPlayer, LayeredTopology, broadcast_multihit_player, layer_layout,
                        layered_broadcast_network)
from .simulation import (ProposalOrigin, Simulation, SimulationPlayer, SimulationStrategy, all_broadcasters,
                         all_then_default_channel, broadcasters_collide, check_consistency, per_channel,
                         receive_nothing, universal)
from .wakeup import (CD, PLAIN, PairSimulator, SimTreeNode, TreePlayer, basic_player, cd_player,
                     cdmc_pair_simulator, cdmc_tree_player, channel_equality_probe, mc_channel_player,
                     mc_two_proposal_player, tree_nodes, tree_player)

__all__ = [
    "BroadcastMultiHitPlayer", "LayeredTopology", "broadcast_multihit_player", "layer_layout",
    "layered_broadcast_network", "ProposalOrigin", "Simulation", "SimulationPlayer", "SimulationStrategy",
    "all_broadcasters", "all_then_default_channel", "broadcasters_collide", "check_consistency",
    "per_channel", "receive_nothing", "universal", "CD", "PLAIN", "PairSimulator", "SimTreeNode",
    "TreePlayer", "basic_player", "cd_player", "cdmc_pair_simulator", "cdmc_tree_player",
    "channel_equality_probe", "mc_channel_player", "mc_two_proposal_player", "tree_nodes", "tree_player",
]
