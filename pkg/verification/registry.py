"""Check name -> (params serializer, check function)."""

from . import serializers as s
from .frames import gram_defect, parseval_defect
from .intertwining import chart_defect, group_defect, intertwine_defect
from .isometry import (
    bandlimited_identity_defect,
    discrete_isometry_defect,
    isometry_defect_continuous,
    kernel_isometry_defect,
    reproducing_trend,
)

CHECKS = {
    "intertwine": (s.IntertwineParamsSerializer, intertwine_defect),
    "gram": (s.GramParamsSerializer, gram_defect),
    "parseval": (s.ParsevalParamsSerializer, parseval_defect),
    "isometry": (s.IsometryParamsSerializer, isometry_defect_continuous),
    "discrete": (s.DiscreteParamsSerializer, discrete_isometry_defect),
    "kernel": (s.KernelParamsSerializer, kernel_isometry_defect),
    "bandlimited": (s.BandlimitedParamsSerializer, bandlimited_identity_defect),
    "charts": (s.ChartParamsSerializer, chart_defect),
    "groups": (s.GroupParamsSerializer, group_defect),
    "reproducing": (s.ReproducingParamsSerializer, reproducing_trend),
}
