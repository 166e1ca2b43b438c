import csv
import json
import re
from pathlib import Path

from structs.analysis_config import INFINITE, AnalysisConfig, Window
from structs.exceptions import ConfigError, MatrixFormatError
from structs.scattering_matrix import ScatteringMatrix
from structs.statistics import Statistics
from structs.wavepacket import GaussianPacket, TabulatedPacket
from util.config import tolerance_profile
from util.logger import CLogger
from util.scattering import haar_scattering, make_scattering, preset
from util.smallmat import matrix_from_dict

log = CLogger().get_logger()

# Haar-random splitter drawn from the run seed
HAAR = "haar"

GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")

WAVEPACKET_COLUMNS = ("omega", "re", "im")


class Parser:
    '''
        Readers for everything an analysis takes as input: scattering
        matrices in the matrix JSON format, tabulated wavepackets in CSV,
        grid specs and whole JSON config files.

        Relative paths inside a config file resolve against the file's
        directory.
    '''

    @staticmethod
    def read_json(path) -> dict:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return json.load(handle)

        except OSError as e:
            raise ConfigError(details=f"Cannot read {path}: {type(e).__name__} | {e.args}")

        except json.JSONDecodeError as e:
            raise ConfigError(details=f"{path} is not valid JSON: {e}")

    @staticmethod
    def matrix_json(path) -> ScatteringMatrix:
        """
        Accepts a bare matrix object or one wrapped as {"S": {...}}.
        """
        data = Parser.read_json(path)

        if isinstance(data, dict) and "S" in data:
            data = data["S"]

        if not isinstance(data, dict):
            raise MatrixFormatError(details=f"{path} does not hold a matrix object")

        return make_scattering(matrix_from_dict(data))

    @staticmethod
    def wavepacket_csv(path) -> TabulatedPacket:
        omega, values = [], []

        try:
            with open(path, "r", encoding="utf-8", newline="") as handle:
                reader = csv.DictReader(handle)
                header = tuple(name.strip() for name in (reader.fieldnames or ()))

                if not set(WAVEPACKET_COLUMNS) <= set(header):
                    raise ConfigError(details=f"{path} needs a header with columns {WAVEPACKET_COLUMNS}, got {header}")

                for line, row in enumerate(reader, start=2):
                    row = {k.strip(): v for k, v in row.items() if k is not None}
                    try:
                        omega.append(float(row["omega"]))
                        values.append(complex(float(row["re"]), float(row["im"])))

                    except (TypeError, ValueError) as e:
                        raise ConfigError(details=f"{path}:{line}: {type(e).__name__} | {e.args}")

        except OSError as e:
            raise ConfigError(details=f"Cannot read {path}: {type(e).__name__} | {e.args}")

        packet = TabulatedPacket.create(omega, values)
        log.info("Read %d samples from %s, normalization factor %.6e", len(omega), path, packet.normalization_factor)

        return packet

    @staticmethod
    def grid(text: str) -> tuple[int, int]:
        match = GRID_PATTERN.match(text or "")

        if not match:
            raise ConfigError(details=f"Grid must look like AxB, got {text!r}")

        alpha_steps, hv_steps = int(match.group(1)), int(match.group(2))

        if alpha_steps < 1 or hv_steps < 1:
            raise ConfigError(details=f"Grid needs at least one step per axis, got {text!r}")

        return alpha_steps, hv_steps

    @staticmethod
    def scattering(spec, base: Path, seed: int = 0) -> tuple[ScatteringMatrix, str]:
        if isinstance(spec, str):
            spec = {"preset": spec}

        if not isinstance(spec, dict):
            raise ConfigError(details=f"Unusable scattering entry {spec!r}")

        if spec.get("preset") == HAAR:
            return haar_scattering(seed), f"haar:{seed}"

        if "preset" in spec:
            try:
                return preset(spec["preset"]), f"preset:{spec['preset']}"

            except KeyError as e:
                raise ConfigError(details=e.args[0])

        if "file" in spec:
            path = base / spec["file"]
            return Parser.matrix_json(path), f"file:{spec['file']}"

        if "matrix" in spec:
            return make_scattering(matrix_from_dict(spec["matrix"])), "inline"

        raise ConfigError(details="scattering needs one of preset, file, matrix")

    @staticmethod
    def wavepacket(spec: dict, base: Path):
        if not isinstance(spec, dict):
            raise ConfigError(details=f"Unusable wavepacket entry {spec!r}")

        kind = spec.get("kind", "gaussian")

        if kind == "gaussian":
            try:
                # natural units: width 1
                return GaussianPacket(
                    center=float(spec.get("center", 0.0)),
                    width=float(spec.get("width", 1.0)),
                    delay=float(spec.get("delay", 0.0)),
                )

            except (TypeError, ValueError) as e:
                raise ConfigError(details=f"Bad Gaussian wavepacket: {type(e).__name__} | {e.args}")

        if kind == "tabulated":
            if "file" not in spec:
                raise ConfigError(details="Tabulated wavepacket needs a file")

            return Parser.wavepacket_csv(base / spec["file"])

        raise ConfigError(details=f"Unknown wavepacket kind {kind!r}")

    @staticmethod
    def window(spec):
        if spec is None or spec == INFINITE:
            return INFINITE

        if isinstance(spec, dict) and "tau" in spec:
            tau = float(spec["tau"])
            if not tau > 0:
                raise ConfigError(details=f"Window tau must be positive, got {tau}")

            t = spec.get("t")
            return Window(tau=tau, t=None if t is None else float(t))

        raise ConfigError(details=f"Window must be 'infinite' or {{'tau': ..., 't': ...}}, got {spec!r}")

    @staticmethod
    def analysis_config(path=None, overrides: dict = None) -> AnalysisConfig:
        """
        Builds an AnalysisConfig from an optional JSON file plus CLI
        overrides (preset, alpha_sq, tau, statistics, seed). Every referenced
        file is read here.
        """
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        data = Parser.read_json(path) if path else {}
        base = Path(path).resolve().parent if path else Path.cwd()

        if not isinstance(data, dict):
            raise ConfigError(details="Config file must hold a JSON object")

        scattering_spec = data.get("scattering")
        if "preset" in overrides:
            scattering_spec = {"preset": overrides["preset"]}

        if scattering_spec is None:
            raise ConfigError(details="No scattering matrix: give --preset or a config 'scattering' entry")

        seed = int(overrides.get("seed", data.get("seed", 0)))
        scattering, source = Parser.scattering(scattering_spec, base, seed)

        psi = phi = None
        packets = data.get("wavepackets")
        alpha_sq = data.get("alpha_sq")

        if "alpha_sq" in overrides:
            alpha_sq, packets = overrides["alpha_sq"], None

        if packets is not None:
            if not isinstance(packets, dict) or "psi" not in packets or "phi" not in packets:
                raise ConfigError(details="wavepackets needs both psi and phi")

            psi = Parser.wavepacket(packets["psi"], base)
            phi = Parser.wavepacket(packets["phi"], base)

        window = Parser.window(data.get("window"))
        if "tau" in overrides:
            t = window.t if isinstance(window, Window) else None
            window = Parser.window({"tau": overrides["tau"], "t": t})

        try:
            statistics = Statistics.parse(overrides.get("statistics", data.get("statistics", "bosonic")))

        except ValueError as e:
            raise ConfigError(details=e.args[0])

        tolerances = tolerance_profile().with_overrides(data.get("tolerances", {}))

        return AnalysisConfig(
            scattering=scattering,
            scattering_source=source,
            psi=psi,
            phi=phi,
            window=window,
            alpha_sq=None if alpha_sq is None else float(alpha_sq),
            statistics=statistics,
            tolerances=tolerances,
            budget=int(data.get("budget", 2000)),
        )
