"""Simulation and verification toolkit for directed random geometric
networks: sector-beam and random-radius ball digraphs, induced/isolated
motif censusing, Monte Carlo evaluation of the limiting constants, and
convergence experiments against them."""

from .build import (
    GeoDigraph,
    brute_force_build,
    build_radius_digraph,
    build_sector_digraph,
    digraph_from_text,
    underlying_undirected_edges,
)
from .census import (
    CensusResult,
    MotifPattern,
    all_weakly_connected_patterns,
    brute_force_census,
    canonical_code,
    census,
    count_induced,
    count_isolated,
    enumerate_weakly_connected_subsets,
    feasibility_probe,
    full_census,
    mutual_pair,
    parse_pattern,
    single_arc,
    single_vertex,
)
from .config import ConfigError, RunConfig, parse_config
from .harness import (
    ExperimentReport,
    RadiusModelParams,
    RegimeError,
    RegimeSchedule,
    SectorModelParams,
    concentration_diagnostic,
    normalize_count,
    run_convergence,
    sparse_beta_window,
)
from .limits import (
    LimitEstimate,
    SectorConfiguration,
    closed_form_mu_k2,
    estimate_mu,
    estimate_phi,
    isolated_vertex_limit,
    sector_union_area,
    thermodynamic_limit,
)
from .model import (
    DensitySpec,
    ModelError,
    NormSpec,
    PointSet,
    RadiusLawSpec,
    SectorConfig,
    density_power_integral,
    in_ball,
    in_sector,
    sample_orientations,
    sample_points,
    sample_radii,
    unit_ball_volume,
)

__version__ = "0.1.0"
