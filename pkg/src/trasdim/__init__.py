"""Exact finite models of the lattice spaces X_(w+k), Y_(w+k), X_2w and
the cover-existence questions behind their transfinite asymptotic dimension."""

__version__ = "0.1.0"

from .borst import SetSystem, derive, ord_interval, ord_system, ord_system_naive
from .covers import Cover, Family, chain_components, check_cover, check_family, diameter, set_distance
from .metrics import Metric, dist_level, dist_sup, dist_tower, metric_audit
from .ordinal import Ordinal, ord_compare, ord_decompose
from .search import (
    AFragment,
    Decision,
    afragment_ord_bounds,
    build_afragment,
    decide_cover,
    decide_cover_naive,
)
from .spaces import (
    LevelPoint,
    RPoint,
    TowerPoint,
    Window,
    embed_block,
    embed_level,
    explicit_window,
    gen_window,
    interval_window,
    member_tower,
    member_xki,
    neighborhood,
)
from .witness import check_coasdim_step, grid_cover, theorem1_witness
