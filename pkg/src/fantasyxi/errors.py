"""Exception hierarchy shared by every stage of the pipeline."""


class FantasyXIError(Exception):
    """Base class for all errors raised by this package."""


# -- ingestion ---------------------------------------------------------------

class MalformedDocument(FantasyXIError):
    """Input bytes are not a parseable YAML document."""


class MissingSection(FantasyXIError):
    """A required document section (info, innings, deliveries) is absent."""


class InvariantViolation(FantasyXIError):
    """Parsed data contradicts itself; the message names the offending path."""


class RootNotFound(FantasyXIError):
    """Corpus root directory does not exist."""


# -- dataset -----------------------------------------------------------------

class EmptySeries(FantasyXIError):
    pass


class LengthMismatch(FantasyXIError):
    pass


# -- learner -----------------------------------------------------------------

class EmptyInput(FantasyXIError):
    pass


class UnknownLabel(FantasyXIError):
    """A categorical label is absent from the codebook under reject policy."""


class TooFewRows(FantasyXIError):
    pass


class InvalidConfig(FantasyXIError):
    pass


class WidthMismatch(FantasyXIError):
    """Row width does not match the model's feature layout."""


class ZeroVariance(FantasyXIError):
    pass


class ModelFormatError(FantasyXIError):
    """Model file is corrupt or has an unsupported schema version."""


# -- predictor ---------------------------------------------------------------

class ColdStart(FantasyXIError):
    """Player has no historical rows in the requested discipline."""


class EmptySquad(FantasyXIError):
    pass


# -- optimizer ---------------------------------------------------------------

class Infeasible(FantasyXIError):
    """No roster satisfies all constraints; the message names the blocker."""


class TooFewPlayers(FantasyXIError):
    pass


class TooLarge(FantasyXIError):
    """Instance exceeds the exhaustive-enumeration guard."""


class EmptyHistory(FantasyXIError):
    pass


# -- service -----------------------------------------------------------------

class ArtifactsMissing(FantasyXIError):
    """A required on-disk artifact (tables, model) was not found."""


class UnknownPlayer(FantasyXIError):
    pass


class UnknownTeam(FantasyXIError):
    pass
