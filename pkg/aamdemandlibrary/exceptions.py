'''
Exceptions raised by every layer of the aamdemandlibrary

:license: MIT, see LICENSE for more details.
'''

class AamDemandError(Exception):
    '''Base class for all errors raised by the aamdemandlibrary'''
    pass

class InvalidInputError(AamDemandError, ValueError):
    '''A numeric input was non-finite or outside its valid range'''
    pass

class ConfigurationError(AamDemandError):
    '''A run configuration value (or a configured dataset) is unusable'''
    pass

class IngestError(AamDemandError):
    '''An input file does not match its declared schema'''
    pass

class MissingFileError(IngestError, IOError):
    '''An input file does not exist'''
    pass

class CalibrationError(AamDemandError):
    '''The samples given to a regression cannot determine the model'''
    pass

class InfeasibleError(AamDemandError):
    '''No flight exists for the itinerary (both ends share a hub)'''
    pass

class RoutingError(AamDemandError):
    '''The routing service failed and no fallback was allowed'''

    def __init__(self, message, cause=None):
        super(RoutingError, self).__init__(message)
        self.cause = cause
