"""Names, inhabitants, the town chronicle and the captain's log."""

from .chronicle import (Chronicle, ChronicleEntry, export_chronicle, write_captains_log,
                        write_chronicle)
from .names import NameModel, bundled, generate_name, name_is_sound, train
from .population import (Address, Inhabitant, NameModels, assign_addresses, generate_population,
                         name_streets)


def default_models() -> NameModels:
    """Name models trained on the bundled corpora."""
    return NameModels(train(bundled("given_male")), train(bundled("given_female")),
                      train(bundled("surnames")), train(bundled("places")))


__all__ = [
    "Address", "Chronicle", "ChronicleEntry", "Inhabitant", "NameModel", "NameModels",
    "assign_addresses", "bundled", "default_models", "export_chronicle", "generate_name",
    "generate_population", "name_is_sound", "name_streets", "train", "write_captains_log",
    "write_chronicle",
]
