"""Figure rendering for the FVA engine's CSV outputs."""

__version__ = "0.1.0"

from .figures import plot_exposure_profile, plot_flag_grid_bar, plot_ratio_sweep
from .io import SchemaError, Table, read_table

__all__ = [
    "SchemaError",
    "Table",
    "plot_exposure_profile",
    "plot_flag_grid_bar",
    "plot_ratio_sweep",
    "read_table",
]
