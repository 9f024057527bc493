"""Multi-conditional ranking: condition DSL, rule engine, benchmark generation,
model backends, ranking strategies and scoring."""

from .conditions import Category, Condition, Priority, make_condition, parse_condition, render_condition
from .engine import Item, Level, fold, gold_ranking, satisfies
from .benchgen import Sample, Scenario, generate_dataset, synth_pool
from .backend import BackendConfig, ModelRequest, ModelResponse, make_backend
from .pipelines import RankingRun, Strategy, run_strategy
from .metrics import aggregate, emit_report, score_sample

__version__ = "0.1.0"
