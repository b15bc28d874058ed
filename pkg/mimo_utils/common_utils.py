import numpy as np
import pandas as pd

CSV_FLOAT_FORMAT = '%.17g'


def db_to_linear(snr_db):
    return 10.0 ** (snr_db / 10.0)


def write_csv(frame, path):
    """One header line, 17 significant digits, '\\n' endings: reruns are byte-identical."""
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return path


def split_complex(values):
    values = np.asarray(values, dtype=complex)
    return values.real, values.imag


def report(message, logfile=None):
    if logfile is not None:
        logfile.write(message + '\n')
        logfile.flush()
    print(message)


def dump_options(options, path):
    with open(path, 'w') as f:
        for key, value in options.items():
            f.write(str(key) + ": " + str(value) + "\n")
