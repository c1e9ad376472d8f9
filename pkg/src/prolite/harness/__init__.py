from .problems import ProblemRecord, FIXTURES, load_problems
from .oracles import (csp_brute_oracle, linear_gold_oracle, cinema_oracle,
                      sum_it_up_oracle)
from .navigate import NavState, navigate_oracle, gen_navigate, mirror_to_origin
from .evaluate import EvalReport, evaluate
from .report import emit_report

__all__ = [
    "ProblemRecord", "FIXTURES", "load_problems",
    "csp_brute_oracle", "linear_gold_oracle", "cinema_oracle",
    "sum_it_up_oracle",
    "NavState", "navigate_oracle", "gen_navigate", "mirror_to_origin",
    "EvalReport", "evaluate", "emit_report",
]
