"""Wire/export schema version, frozen at v1."""

SCHEMA_VERSION = 1
