import argparse
from harness import SimConfig
from mimo_utils.errors import ConfigError

COMMAND_SWEEPS = {
    'moments': 'moments',
    'ser-vs-snr': 'snr',
    'ser-vs-tau': 'tau',
    'ser-vs-alpha': 'alpha',
    'scatter': 'scatter',
    'regions': 'regions',
}

ALPHA_GRID = (0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0)

# default grids used when the swept key is given neither in the file nor on the command line
SWEEP_GRIDS = {
    'snr': {'snr_db': (-10.0, -5.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0, 30.0)},
    'tau': {'tau': (4, 8, 16, 32, 64)},
    # log spaced: the SER minimum sits near alpha ~ 1/max(V), with V in the hundreds
    'alpha': {'alpha': ALPHA_GRID, 'snr_db': (5.0,)},
}

INT_LISTS = ('m_antennas', 'tau')
FLOAT_LISTS = ('snr_db', 'alpha')
INTS = ('seed', 'trials', 'threads', 'grid_size', 'k_users')
FLOATS = ('extent',)
SYMBOL_LISTS = ('constellation', 'pilot')
CONFIG_KEYS = INT_LISTS + FLOAT_LISTS + INTS + FLOATS + SYMBOL_LISTS


def _add_common_arguments(parser):
    # run related
    parser.add_argument('--config', type=str, default=None, help='flat key = value config file')
    parser.add_argument('--seed', type=int, default=None, help='master seed (unsigned 64-bit), required')
    parser.add_argument('--trials', type=int, default=None, help='Monte Carlo trials per operating point')
    parser.add_argument('--threads', type=int, default=None, help='number of worker processes')
    parser.add_argument('--out', type=str, default=None, help='output csv path, default <command>.csv')
    # scenario related, lists are comma separated
    parser.add_argument('--m_antennas', type=str, default=None, help='number of BS antennas M, e.g. 64,128')
    parser.add_argument('--tau', type=str, default=None, help='pilot length(s)')
    parser.add_argument('--snr_db', type=str, default=None, help='transmit SNR(s) in dB')
    parser.add_argument('--alpha', type=str, default=None, help='detector weight exponent(s) in [0, 1]')
    parser.add_argument('--constellation', type=str, default=None, help='16qam, qpsk or explicit symbols')
    parser.add_argument('--pilot', type=str, default=None, help="'dft2' or explicit unit-modulus entries")
    parser.add_argument('--grid_size', type=int, default=None, help='region raster resolution per axis')
    parser.add_argument('--extent', type=float, default=None, help='region raster half-width')
    parser.add_argument('--progress', action='store_true', help='show tqdm progress bars')
    parser.add_argument('--wandb', action='store_true', help='log SER rows to wandb')
    parser.add_argument('--wandb_project_name', type=str, default='OneBitMIMO', help='wandb project name')


def get_parser_sim():
    parser = argparse.ArgumentParser(description='1-bit ADC massive MIMO uplink simulations')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for command in COMMAND_SWEEPS:
        sub = subparsers.add_parser(command)
        _add_common_arguments(sub)
        if command == 'moments':
            sub.add_argument('--asymptotic', action='store_true', help='also write the high-SNR limits')
    return parser


def _split(text):
    items = [item.strip() for item in text.split(',')]
    if not all(items):
        raise ValueError(f"empty list element in '{text}'")
    return items


def parse_config_value(key, text):
    """Typed value for one config key; raises ValueError on malformed text."""
    text = str(text).strip()
    if key in INT_LISTS:
        return tuple(int(v) for v in _split(text))
    if key in FLOAT_LISTS:
        return tuple(float(v) for v in _split(text))
    if key in INTS:
        return int(text)
    if key in FLOATS:
        return float(text)
    if key in SYMBOL_LISTS:
        if ',' not in text:
            return text.lower()
        return tuple(complex(v.replace(' ', '')) for v in _split(text))
    raise KeyError(key)


def load_config_file(path):
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from e

    values = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{line}'")
        key, text = (part.strip() for part in line.split('=', 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        try:
            values[key] = parse_config_value(key, text)
        except ValueError as e:
            raise ConfigError(f"{path}:{lineno}: bad value for '{key}': {e}") from e
    return values


def build_config(opts):
    """SimConfig from defaults < sweep grid < config file < command-line flags."""
    sweep = COMMAND_SWEEPS[opts.command]
    values = dict(SWEEP_GRIDS.get(sweep, {}))
    if opts.config is not None:
        values.update(load_config_file(opts.config))
    for key in CONFIG_KEYS:
        flag = getattr(opts, key, None)
        if flag is None:
            continue
        if isinstance(flag, str):
            try:
                flag = parse_config_value(key, flag)
            except ValueError as e:
                raise ConfigError(f"bad value for --{key}: {e}") from e
        values[key] = flag
    if 'seed' not in values:
        raise ConfigError("a seed is required (--seed or 'seed = ...' in the config file)")
    return SimConfig(sweep=sweep, progress=opts.progress, **values)
