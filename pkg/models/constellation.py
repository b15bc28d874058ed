import numpy as np
from dataclasses import dataclass
from mimo_utils.errors import ConfigError

POWER_TOL = 1e-12

# Gray map of two bits onto one 16-QAM axis
GRAY_LEVELS = {0b00: -3, 0b01: -1, 0b11: 1, 0b10: 3}


@dataclass(frozen=True)
class Constellation:
    """Ordered transmit alphabet with unit mean power; index = position in symbols."""
    symbols: tuple
    name: str = 'custom'

    def __post_init__(self):
        symbols = tuple(complex(s) for s in self.symbols)
        if not symbols:
            raise ConfigError("constellation must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ConfigError(f"constellation '{self.name}' has repeated symbols")
        power = np.mean(np.abs(np.array(symbols)) ** 2)
        if abs(power - 1) > POWER_TOL:
            raise ConfigError(f"constellation '{self.name}' has mean power {power!r}, expected 1")
        object.__setattr__(self, 'symbols', symbols)

    def __len__(self):
        return len(self.symbols)

    @property
    def array(self):
        return np.array(self.symbols, dtype=complex)

    def index_of(self, symbol, tol=1e-12):
        distances = np.abs(self.array - complex(symbol))
        idx = int(np.argmin(distances))
        if distances[idx] > tol:
            raise KeyError(f"{symbol} is not a symbol of '{self.name}'")
        return idx


def qam16():
    """Gray-labelled 16-QAM scaled by 1/sqrt(10); index = (I bits << 2) | Q bits."""
    scale = np.sqrt(10)
    symbols = []
    for label in range(16):
        i_level = GRAY_LEVELS[label >> 2]
        q_level = GRAY_LEVELS[label & 0b11]
        symbols.append(complex(i_level / scale, q_level / scale))
    return Constellation(tuple(symbols), '16qam')


def qpsk():
    scale = np.sqrt(2)
    symbols = [complex(i / scale, q / scale) for i in (-1, 1) for q in (-1, 1)]
    return Constellation(tuple(symbols), 'qpsk')


CONSTELLATIONS = {'16qam': qam16, 'qpsk': qpsk}


def get_constellation(spec):
    """Build a constellation from a factory name or an explicit symbol sequence."""
    if isinstance(spec, Constellation):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower()
        if key not in CONSTELLATIONS:
            raise ConfigError(f"unknown constellation '{spec}', choose from {sorted(CONSTELLATIONS)}")
        return CONSTELLATIONS[key]()
    return Constellation(tuple(spec))
