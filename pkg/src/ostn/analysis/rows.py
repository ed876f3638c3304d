"""One SNR point's bundle of outage values and its CSV rendering."""

from __future__ import annotations

from dataclasses import dataclass

CSV_COLUMNS = ("snr_db", "op_sat_mc", "op_sat_mc_se", "op_sat_lb", "op_sat_asymp",
               "op_sat_sa", "op_iot_mc", "op_iot_mc_se", "op_iot_lb", "op_iot_asymp",
               "op_iot_sa", "mu_used")


@dataclass
class SweepRow:
    """Values for one SNR point; ``None`` cells are rendered as ``NA``.

    Asymptotic values are stored unclamped; the ``*_asymp_valid`` flags mark
    points where they are not yet probabilities.
    """

    snr_db: float
    op_sat_mc: float | None = None
    op_sat_mc_se: float | None = None
    op_sat_lb: float | None = None
    op_sat_asymp: float | None = None
    op_sat_sa: float | None = None
    op_iot_mc: float | None = None
    op_iot_mc_se: float | None = None
    op_iot_lb: float | None = None
    op_iot_asymp: float | None = None
    op_iot_sa: float | None = None
    mu_used: float | None = None
    sat_asymp_valid: bool = True
    iot_asymp_valid: bool = True
    failed: bool = False

    def csv_cells(self) -> list[str]:
        return [format_cell(getattr(self, name)) for name in CSV_COLUMNS]

    def to_csv_line(self) -> str:
        return ",".join(self.csv_cells())


def format_cell(value: float | None) -> str:
    if value is None:
        return "NA"
    return f"{value:.8e}"


def csv_header() -> str:
    return ",".join(CSV_COLUMNS)

