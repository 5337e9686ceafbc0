"""Solar-powered smart-agriculture simulator and telemetry service.

Subsystems:
    power       solar panel / diode charge gate / battery / 3.3 V rail model
    sensors     soil-moisture calibration, soil column dynamics, DHT stub, camera stub
    controller  threshold-driven irrigation relay loop
    cloud       channel-based telemetry store with HTTP API
    classifier  from-scratch CNN (conv, residual block, softmax) with training
    scenario    deterministic day-scale simulation engine and CSV/JSON reporting
"""

__version__ = "0.1.0"
