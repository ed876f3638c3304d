"""Closed-form, asymptotic and semi-analytic outage evaluators."""

from .context import ClosedFormContext, enumerate_multinomial
from .satellite import (Asymptote, cond_cdf_ac, op_sat_asymp, op_sat_lb, psi_moment,
                        semianalytic_op_sat)
from .iot import (IotTerms, cond_cdf_ac_selected, eval_iot_terms, op_iot_asymp, op_iot_lb,
                  semianalytic_op_iot)
from .diversity import diversity_fit
from .rows import CSV_COLUMNS, SweepRow, csv_header

__all__ = [
    "ClosedFormContext", "enumerate_multinomial",
    "Asymptote", "cond_cdf_ac", "op_sat_asymp", "op_sat_lb", "psi_moment", "semianalytic_op_sat",
    "IotTerms", "cond_cdf_ac_selected", "eval_iot_terms", "op_iot_asymp", "op_iot_lb",
    "semianalytic_op_iot",
    "diversity_fit",
    "CSV_COLUMNS", "SweepRow", "csv_header",
]
