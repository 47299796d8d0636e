from .api import FitArtifacts, StudyReportAPI
from .progress import ReportProgressTracker
from .studies import STUDIES, StudyDefinition, get_study
from .writer import write_bundle, write_text

__all__ = [
    'StudyReportAPI', 'FitArtifacts', 'ReportProgressTracker',
    'STUDIES', 'StudyDefinition', 'get_study',
    'write_bundle', 'write_text',
]
