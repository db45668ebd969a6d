# pylint: disable=missing-docstring
from .graph import WeightingModel, load_edge_list, generate_power_law, degree_top_k
from .rbr import RbrParams, run_rbr, evaluate_tuples
from .baselines import greedy_mc, proximity, random_seeds
