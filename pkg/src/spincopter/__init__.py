"""Flight simulator and control library for spinning bicopters and the
quadcopter they assemble into: rigid-body plant with lumped rotor drag,
relaxed-hover analysis, spin-phased cascaded control, and a scenario
harness with CSV logging."""

__version__ = "0.1.0"
