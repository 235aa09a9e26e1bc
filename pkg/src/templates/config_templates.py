"""
Bundled run-configuration templates.
The device block holds the measured parameters of the resonator; each
experiment template adds the sweep that reproduces one measurement.
"""

from typing import List, Optional

DEVICE_BLOCK = """\
# Measured device: modes 3 and 4 of the SQUID-terminated resonator
[mode3]
omega = 4.345 GHz
gamma_total = 0.56 MHz
gamma_ext = 0.52 MHz
kerr = 71 kHz

[mode4]
omega = 6.150 GHz
gamma_total = 0.78 MHz
gamma_ext = 0.70 MHz
kerr = 178 kHz
"""

PUMP_BLOCK = """\
[pump]
epsilon = {epsilon} gamma
delta = {delta} gamma
"""

NOISE_BLOCK = """\
[noise]
vacuum = on
vacuum_scale = 1.0
flicker_amplitude = 0.0

[integrator]
dt = 0.005 gamma
record_stride = 10
initial_amplitude = 0.001
"""

SWEEP_BLOCKS = {
    "default": "",
    "map": """\
[sweep]
epsilon = 0, 4, 9
delta = -8, 4, 13
""",
    "ramp": """\
[sweep]
epsilon = 0.8, 4, 17
""",
    "lock": """\
# mean input photon numbers <n> of the tone on mode 3
[sweep]
photons = 0.01, 10, 13, log
""",
    "sync": """\
[tone]
mode = 3
photons = 1
detuning = 0 gamma

[sweep]
photons = 0.5, 4, 4, log
signal_detuning = -2, 2, 41
""",
    "kerr-fit": """\
[sweep]
delta = -1, 1, 5
""",
}

PUMP_DEFAULTS = {"ramp": (3.0, 0.26), "map": (3.0, 0.0)}


class ConfigTemplates:
    """Collection of bundled configuration texts, one per experiment."""

    def __init__(self):
        """Assemble the templates from the shared blocks."""
        self._templates = {}
        for name, sweep in SWEEP_BLOCKS.items():
            epsilon, delta = PUMP_DEFAULTS.get(name, (3.0, 0.0))
            self._templates[name] = self.create_custom_config(epsilon, delta, sweep)

    def get_template(self, name: str = "default") -> str:
        """
        Get a bundled configuration text.

        Args:
            name: Template name ('default', 'map', 'ramp', 'lock', 'sync', 'kerr-fit')

        Returns:
            Configuration text in the run-config format
        """
        if name not in self._templates:
            raise ValueError(f"Unknown template: {name}. Available templates: {list(self._templates.keys())}")
        return self._templates[name]

    def get_available_templates(self) -> List[str]:
        """Get list of available template names."""
        return list(self._templates.keys())

    def create_custom_config(self, epsilon: float, delta: float, extra: Optional[str] = None) -> str:
        """
        Create a configuration for the bundled device at another operating point.

        Args:
            epsilon: Pump strength in multiples of Gamma
            delta: Pump detuning in multiples of Gamma
            extra: Additional sections ([tone], [sweep], [run], ...)

        Returns:
            Configuration text
        """
        parts = [DEVICE_BLOCK, PUMP_BLOCK.format(epsilon=epsilon, delta=delta), NOISE_BLOCK]
        if extra:
            parts.append(extra)
        return "\n".join(parts)
