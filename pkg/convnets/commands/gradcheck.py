from typing import List, Sequence

from rich import print

from ..model_zoo import BUILTINS, VARIANTS, builtin
from ..output_formatting import gradcheck_table
from ..trainer import GradcheckReport, gradcheck
from ..utils.errors import NumericError

TINY_MAPS = 2
TINY_UNITS = 4


class gradient_check:
    """Finite-difference checks of tiny instances of builtin models.

    Map and unit counts are capped so every check runs in seconds; the
    layer structure and the spatial geometry stay those of the builtin.
    """

    def __init__(self, models: Sequence[str] = BUILTINS,
                 variants: Sequence[str] = VARIANTS, seed: int = 0,
                 tolerance: float = 1e-4, max_coords: int = 20,
                 max_maps: int = TINY_MAPS,
                 max_units: int = TINY_UNITS) -> None:
        self.models = list(models)
        self.variants = list(variants)
        self.seed = seed
        self.tolerance = tolerance
        self.max_coords = max_coords
        self.max_maps = max_maps
        self.max_units = max_units
        self.reports: List[GradcheckReport] = []
        self.main_process()

    def main_process(self) -> None:
        for name in self.models:
            for variant in self.variants:
                spec = builtin(name, variant, max_maps=self.max_maps,
                               max_units=self.max_units, conv_dropout=True)
                self.reports.append(gradcheck(
                    spec, self.seed, self.tolerance,
                    max_coords=self.max_coords))
        print(gradcheck_table(self.reports))
        failed = [r.model for r in self.reports if not r.passed]
        if failed:
            raise NumericError("gradient check failed",
                               models=", ".join(failed))
        print(f"All {len(self.reports)} gradient checks passed")
