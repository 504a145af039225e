from .simulate import (DeliveryRecord, SimConfig, SimResult, SourceStats, age_from_records,
                       estimate_eyw, simulate, simulate_rates, trapezoid_area)

__all__ = ["DeliveryRecord", "SimConfig", "SimResult", "SourceStats", "age_from_records",
           "estimate_eyw", "simulate", "simulate_rates", "trapezoid_area"]
