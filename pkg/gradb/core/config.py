from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    """Engine settings"""

    # Graph Store
    STRICT_MODE: bool = False

    # Matching
    MAX_MATCHES: int = 10000
    BRUTE_FORCE_MAX_PATTERN_NODES: int = 8
    BRUTE_FORCE_MAX_GRAPH_NODES: int = 64

    # Constraints
    EDGE_LABEL_RULE_GLOBAL: bool = False

    # Serialization
    FORMAT_VERSION: str = "grad/1"
    FILE_ENCODING: str = "utf-8"

    # ETL
    TABLE_DELIMITER: str = "\t"

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="GRADB_",
        case_sensitive=True,
        extra="ignore",
    )

# Global settings instance
settings = Settings()
