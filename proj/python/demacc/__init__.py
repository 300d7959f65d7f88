"""DEM vertical accuracy assessment against ground control points."""

import json as _json

from ._demacc import (  # noqa: F401
    ConfigError,
    DegenerateError,
    Error,
    Grid,
    ParseError,
    __version__,
    f_cdf,
    f_test,
    make_plane,
    make_smoothed_noise,
    moran,
    pearson_r,
    read_grid,
    rmse_from_moments,
    slope_aspect,
    summarize,
    tukey_fences,
    two_tailed_p,
)
from ._demacc import assess as _assess


def assess(settings=None, config=None, out_dir=None):
    """Run the full pipeline and return the report as a dict.

    `settings` maps "section.key" to string values, e.g.
    {"input.dem": "dem.asc", "input.gcps": "gcps.csv"}.
    """
    settings = {k: str(v) for k, v in (settings or {}).items()}
    return _json.loads(_assess(settings, config, out_dir))
