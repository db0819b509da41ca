from .base_controller import BaseController, config_from_checkpoint
from .curriculum import CurriculumState, curriculum_advance
from .data_controller import DataController
from .pretrain_controller import PretrainController
from .gan_controller import GanController
from .seq2seq_controller import Seq2SeqController
from .evaluation_controller import EvaluationController
from .diagnostic_controller import DiagnosticController
