from pydantic import BaseModel, ConfigDict
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional
import logging
import yaml
from pathlib import Path


class NumericPolicy(BaseModel):
    """Tolerâncias numéricas usadas em todo o pipeline"""
    model_config = ConfigDict(frozen=True)

    isotropy_tol: float = 1e-8
    potential_tol: float = 1e-8
    spectral_floor_tol: float = 1e-9
    admissibility_tol: float = 1e-10
    weight_tie_tol: float = 1e-12
    ortho_tol: float = 1e-10
    span_tol: float = 1e-8
    barrier_tol: float = 1e-12
    cert_match_tol: float = 1e-8
    ceil_slack: float = 1e-9


class Settings(BaseSettings):
    """Configurações da aplicação"""
    model_config = SettingsConfigDict(env_prefix="LPEMBED_", case_sensitive=True)

    PROJECT_NAME: str = "lpembed"

    # Política numérica
    NUMERIC: NumericPolicy = NumericPolicy()

    # Lift
    MONOMIAL_CAP: int = 10**6
    LIFT_CHUNK_SIZE: int = 4096

    # Execução
    N_JOBS: int = 1
    PARALLEL_MIN_CANDIDATES: int = 20000
    DEFAULT_TRIALS: int = 10000
    DISTORTION_BATCH_SIZE: int = 2000

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None
    LOG_FORMAT: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    def __init__(self, config_path: Optional[Path] = None, **values):
        super().__init__(**values)
        self.load_yaml_config(config_path)

    def load_yaml_config(self, config_path: Optional[Path] = None):
        """Carrega configurações do arquivo YAML"""
        config_path = config_path or Path(__file__).parent.parent / "config.yaml"
        if not config_path.exists():
            return

        with open(config_path, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}

        # Atualizar configurações
        if 'numeric' in config:
            self.NUMERIC = self.NUMERIC.model_copy(update=config['numeric'])

        if 'lift' in config:
            self.MONOMIAL_CAP = int(config['lift'].get('monomial_cap', self.MONOMIAL_CAP))
            self.LIFT_CHUNK_SIZE = int(config['lift'].get('chunk_size', self.LIFT_CHUNK_SIZE))

        if 'runtime' in config:
            self.N_JOBS = int(config['runtime'].get('n_jobs', self.N_JOBS))
            self.PARALLEL_MIN_CANDIDATES = int(
                config['runtime'].get('parallel_min_candidates', self.PARALLEL_MIN_CANDIDATES)
            )
            self.DEFAULT_TRIALS = int(config['runtime'].get('default_trials', self.DEFAULT_TRIALS))
            self.DISTORTION_BATCH_SIZE = int(
                config['runtime'].get('distortion_batch_size', self.DISTORTION_BATCH_SIZE)
            )

        if 'logging' in config:
            self.LOG_LEVEL = config['logging'].get('level', self.LOG_LEVEL)
            self.LOG_FILE = config['logging'].get('file', self.LOG_FILE)


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Configura o logging da aplicação (stderr e, opcionalmente, arquivo)"""
    handlers = [logging.StreamHandler()]
    log_file = log_file or settings.LOG_FILE
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format=settings.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


settings = Settings()
