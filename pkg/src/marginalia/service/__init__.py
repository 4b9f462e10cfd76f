from .config import ServiceConfig
from .core import ServiceCore
from .http import create_app
from .store import DocumentStore, FileStore, MemoryStore, StoredRecord, update_record

__all__ = [
    "DocumentStore",
    "FileStore",
    "MemoryStore",
    "ServiceConfig",
    "ServiceCore",
    "StoredRecord",
    "create_app",
    "update_record",
]
