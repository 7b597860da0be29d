"""Training carbon accounting and the climate-performance model card.

Emissions are power (kW) x duration (hours) x grid intensity (gCO2e/kWh),
kept in grams internally and rendered in kilograms at two decimals. Card
emission rows are always recomputed from the card's own inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import DataError


@dataclass(frozen=True)
class CarbonParams:
    power_kw: float
    hours: float
    grid_intensity_g_per_kwh: float
    inference_g_per_sample: float | None = None

    def __post_init__(self) -> None:
        for name in ("power_kw", "hours", "grid_intensity_g_per_kwh"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DataError(f"{name} must be finite and non-negative, got {value}")
        if self.inference_g_per_sample is not None and self.inference_g_per_sample < 0:
            raise DataError("inference_g_per_sample must be non-negative")


def co2_emissions(params: CarbonParams) -> float:
    """Grams of CO2e: power_kw x hours x grid intensity."""
    return params.power_kw * params.hours * params.grid_intensity_g_per_kwh


def format_kg(grams: float) -> str:
    return f"{grams / 1000.0:.2f} kg"


CARD_FIELDS = (
    "publicly_available",
    "final_train_hours",
    "total_hours",
    "power_kw",
    "location",
    "grid_intensity_g_per_kwh",
    "inference_co2_mg_per_sample",
)

_ROW_LABELS = (
    "1. Model publicly available?",
    "2. Time to train final model",
    "3. Time for all experiments",
    "4. Power of GPU and CPU",
    "5. Location for computations",
    "6. Energy mix at location",
    "7. CO2eq for final model",
    "8. CO2eq for all experiments",
    "9. Average CO2eq for inference per sample",
)


@dataclass(frozen=True)
class ModelCard:
    """Nine-row climate-performance disclosure.

    The per-sample inference figure is a reported pass-through value, not
    derived from the other fields.
    """

    publicly_available: str
    final_train_hours: float
    total_hours: float
    power_kw: float
    location: str
    grid_intensity_g_per_kwh: float
    inference_co2_mg_per_sample: float | None = None

    @property
    def final_co2_g(self) -> float:
        return co2_emissions(
            CarbonParams(self.power_kw, self.final_train_hours, self.grid_intensity_g_per_kwh)
        )

    @property
    def total_co2_g(self) -> float:
        return co2_emissions(
            CarbonParams(self.power_kw, self.total_hours, self.grid_intensity_g_per_kwh)
        )


def model_card_from_mapping(data: Mapping) -> ModelCard:
    missing = [f for f in CARD_FIELDS[:-1] if data.get(f) is None]
    if missing:
        raise DataError(f"model card missing field(s): {', '.join(missing)}")
    available = data["publicly_available"]
    if isinstance(available, bool):
        available = "Yes" if available else "No"
    return ModelCard(
        publicly_available=str(available),
        final_train_hours=float(data["final_train_hours"]),
        total_hours=float(data["total_hours"]),
        power_kw=float(data["power_kw"]),
        location=str(data["location"]),
        grid_intensity_g_per_kwh=float(data["grid_intensity_g_per_kwh"]),
        inference_co2_mg_per_sample=(
            None
            if data.get("inference_co2_mg_per_sample") is None
            else float(data["inference_co2_mg_per_sample"])
        ),
    )


def model_card_to_json(card: ModelCard) -> dict:
    return {
        "publicly_available": card.publicly_available,
        "final_train_hours": card.final_train_hours,
        "total_hours": card.total_hours,
        "power_kw": card.power_kw,
        "location": card.location,
        "grid_intensity_g_per_kwh": card.grid_intensity_g_per_kwh,
        "final_co2_g": card.final_co2_g,
        "final_co2": format_kg(card.final_co2_g),
        "total_co2_g": card.total_co2_g,
        "total_co2": format_kg(card.total_co2_g),
        "inference_co2_mg_per_sample": card.inference_co2_mg_per_sample,
    }


def _fmt_number(value: float) -> str:
    return f"{value:g}"


def render_model_card(card: ModelCard) -> str:
    """Plain-text nine-row card in the canonical row order."""
    values = (
        card.publicly_available,
        f"{_fmt_number(card.final_train_hours)} hours",
        f"{_fmt_number(card.total_hours)} hours",
        f"{_fmt_number(card.power_kw)} kW",
        card.location,
        f"{_fmt_number(card.grid_intensity_g_per_kwh)} gCO2eq/kWh",
        format_kg(card.final_co2_g),
        format_kg(card.total_co2_g),
        (
            f"{_fmt_number(card.inference_co2_mg_per_sample)} mg"
            if card.inference_co2_mg_per_sample is not None
            else "n/a"
        ),
    )
    width = max(len(label) for label in _ROW_LABELS)
    return "\n".join(
        f"{label.ljust(width)}  {value}" for label, value in zip(_ROW_LABELS, values)
    )


def write_model_card(card: ModelCard, json_path) -> None:
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(model_card_to_json(card), fh, indent=2, sort_keys=True)
        fh.write("\n")
