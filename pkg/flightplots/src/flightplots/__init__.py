"""Figure rendering for flight-log CSVs: trajectory, attitude, yaw rate,
and gain stability maps."""

from flightplots.render import (  # noqa: F401
    DEADZONE_RAD,
    EmptyLogError,
    KINDS,
    PlotSpec,
    RenderInfo,
    SchemaError,
    render,
)

__version__ = "0.1.0"
