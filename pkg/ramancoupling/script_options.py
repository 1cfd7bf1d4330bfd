# Author: ramancoupling developers
# Created: October 2026

__all__ = ['set_formatter', 'set_spectrum_options', 'set_stark_options',
           'set_dynamics_options', 'set_fit_options', 'set_calibrate_options',
           'CommandParser']

from optparse import NO_DEFAULT, OptionParser, TitledHelpFormatter

from .errors import ConfigError


class MyHelpFormatter(TitledHelpFormatter):

    def format_option(self, option):
        old_help = option.help
        default = option.default
        if isinstance(default, str) and ' ' in default:
            default = repr(default)
        if option.help is None:
            option.help = 'Specify a %s.' % (option.type)
        if option.type == 'choice':
            choices = []
            for choice in option.choices:
                if ' ' in choice:
                    choice = repr(choice)
                if choice == option.default:
                    choice = '[' + choice + ']'
                choices.append(choice)
            option.help = '%s Choices: %s.' % (option.help, ', '.join(choices))
        elif default not in (NO_DEFAULT, None):
            if option.action == 'store_false':
                option.help = '%s Default: %s.' % (option.help, not default)
            else:
                option.help = '%s Default: %s.' % (option.help, default)

        result = TitledHelpFormatter.format_option(self, option)
        option.help = old_help
        return result


help_formatter = MyHelpFormatter()


class CommandParser(OptionParser):
    """OptionParser that reports usage errors as :class:`ConfigError`."""

    def error(self, msg):
        raise ConfigError('%s: %s' % (self.get_prog_name(), msg))


def set_formatter(parser):
    """Set customized help formatter.
    """
    parser.formatter = help_formatter


def _set_common_options(parser):
    parser.add_option('--config', '-c',
                      type='string', metavar='PATH',
                      help='Specify the JSON run configuration.'
                      )
    parser.add_option('--out', '-o',
                      type='string', metavar='DIR', default='.',
                      help='Specify the output directory.'
                      )
    parser.add_option('--seed',
                      type='int',
                      help='Override the seed of the configuration.'
                      )
    parser.add_option('--workers',
                      type='int', default=1,
                      help='Specify the number of worker processes for sweeps.'
                      )
    parser.add_option('--verbose', '-v',
                      action='store_true', default=False,
                      help='Log progress messages.'
                      )
    parser.add_option('--debug',
                      action='store_true', default=False,
                      help='Log debug messages.'
                      )


def set_spectrum_options(parser):
    set_formatter(parser)
    parser.set_usage('%prog [options] --config PATH')
    parser.set_description('Compute the effective coupling versus drive amplitude from first-order '
                           'perturbation theory, parallel transport and the Lambda-system '
                           'reference, and optionally a transmission map.')
    _set_common_options(parser)


def set_stark_options(parser):
    set_formatter(parser)
    parser.set_usage('%prog [options] --config PATH')
    parser.set_description('Compute the ac Stark shift of the f0-g1 resonance from the '
                           'resolvent series at each configured order and by parallel transport.')
    _set_common_options(parser)


def set_dynamics_options(parser):
    set_formatter(parser)
    parser.set_usage('%prog [options] --config PATH')
    parser.set_description('Simulate chirped pi pulses over a grid of durations and rise times.')
    _set_common_options(parser)


def set_fit_options(parser):
    set_formatter(parser)
    parser.set_usage('%prog [options] --config PATH')
    parser.set_description('Fit the transmission response to a measured or synthetic trace.')
    _set_common_options(parser)


def set_calibrate_options(parser):
    set_formatter(parser)
    parser.set_usage('%prog [options] --config PATH')
    parser.set_description('Fit the drive power to amplitude conversion factor to measured '
                           'or synthetic Stark shifts.')
    _set_common_options(parser)
