#pragma once

// Shipped default word lists. Each list is stored in the same line format the
// loaders accept from disk (one token or phrase per line, '#' comments), so a
// file with identical content reproduces the built-in behaviour.
//
// Lists are versioned through kResourceVersion; bump it whenever an entry
// changes so stored feature files can be traced to the lists that made them.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lexboot/corpus.hpp"
#include "lexboot/error.hpp"

namespace lexboot {

inline constexpr std::string_view kResourceVersion = "2026.1";

/// Parses a word list: one entry per line, '#' starts a comment, entries are
/// normalized so they compare equal to corpus tokens.
inline std::vector<std::string> parse_word_list(std::string_view content) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto norm = normalize(line);
        if (!norm.empty()) out.push_back(norm);
        start = end + 1;
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
    return parse_word_list(read_text_file(path));
}

namespace shipped {

inline constexpr std::string_view kStopwords = R"(
a
about
above
after
again
against
all
also
am
an
and
any
are
as
at
be
because
been
before
being
below
between
both
but
by
can
could
did
do
does
doing
down
during
each
few
for
from
further
get
got
had
has
have
having
he
her
here
hers
herself
him
himself
his
how
i
if
in
into
is
it
its
itself
just
me
more
most
my
myself
no
nor
not
now
of
off
on
once
only
or
other
our
ours
ourselves
out
over
own
same
she
should
so
some
such
than
that
the
their
theirs
them
themselves
then
there
these
they
this
those
through
to
too
under
until
up
very
was
we
were
what
when
where
which
while
who
whom
why
will
with
would
you
your
yours
yourself
yourselves
s
t
u
ur
im
dont
its
rt
amp
via
)";

// Pronoun types
inline constexpr std::string_view kFirstPerson = R"(
i
me
my
mine
myself
we
us
our
ours
ourselves
)";

inline constexpr std::string_view kSecondPerson = R"(
you
your
yours
yourself
yourselves
u
ur
ya
)";

inline constexpr std::string_view kThirdPerson = R"(
he
him
his
himself
she
her
hers
herself
it
its
itself
they
them
their
theirs
themselves
)";

inline constexpr std::string_view kDemonstrative = R"(
this
that
these
those
)";

inline constexpr std::string_view kIndefinite = R"(
anybody
anyone
anything
everybody
everyone
everything
nobody
nothing
somebody
someone
something
none
no one
each
either
neither
another
)";

// Politeness strategies: gratitude, greetings, hedges, deference.
inline constexpr std::string_view kPolite = R"(
# gratitude
thank you
thanks
thank
thx
thanku
appreciate
appreciated
grateful
# greetings
hi
hello
hey
good morning
good afternoon
good evening
dear
# hedges
perhaps
maybe
possibly
i think
i believe
i guess
i suppose
might
# deference
please
pls
plz
kindly
sir
madam
mam
excuse me
sorry
apologies
would you mind
if possible
)";

// Impolite strategies: profanity and insults. Direct-question starts are
// listed separately because they only count at the start of a sentence.
inline constexpr std::string_view kImpolite = R"(
damn
dammit
hell
crap
shit
shitty
bullshit
fuck
fucking
fucked
wtf
stfu
bloody
stupid
idiot
idiots
idiotic
moron
morons
dumb
pathetic
useless
shame on you
disgrace
rubbish
)";

inline constexpr std::string_view kDirectQuestionStarts = R"(
why
what
how
who
where
when
)";

// Request cues.
inline constexpr std::string_view kPleaseWords = R"(
please
pls
plz
kindly
)";

inline constexpr std::string_view kModalStarts = R"(
can
could
will
would
may
might
shall
should
)";

inline constexpr std::string_view kImperativeVerbs = R"(
fix
send
check
help
stop
look
give
tell
let
make
provide
resolve
restore
repair
clean
reduce
start
increase
arrange
take
do
call
reply
respond
refund
update
inform
ensure
consider
improve
add
remove
run
open
sort
deploy
act
investigate
)";

// Sentiment word lists. Each lexicon is split into positive and negative
// lists; the optional strength is a per-list constant.

inline constexpr std::string_view kMpqaStrongPositive = R"(
excellent
amazing
awesome
wonderful
fantastic
great
love
loved
perfect
superb
brilliant
outstanding
delighted
happy
impressive
best
)";

inline constexpr std::string_view kMpqaWeakPositive = R"(
good
nice
fine
clean
comfortable
fast
quick
smooth
safe
helpful
efficient
reliable
convenient
easy
better
improved
pleasant
polite
punctual
affordable
cheap
ok
okay
glad
thanks
thank
)";

inline constexpr std::string_view kMpqaStrongNegative = R"(
terrible
horrible
awful
worst
pathetic
disgusting
hate
hated
furious
outrageous
unacceptable
shameful
disaster
nightmare
useless
rude
)";

inline constexpr std::string_view kMpqaWeakNegative = R"(
bad
poor
slow
late
delayed
dirty
crowded
overcrowded
broken
problem
problems
issue
issues
fail
failed
failure
unfair
expensive
unsafe
unreliable
annoying
angry
sad
wrong
worse
stuck
cancelled
canceled
noisy
smelly
uncomfortable
)";

inline constexpr std::string_view kNrcPositive = R"(
good
great
happy
love
safe
clean
comfort
comfortable
smooth
enjoy
enjoyed
fun
beautiful
excellent
helpful
kind
hope
improvement
trust
reward
relief
friendly
support
wonderful
journey
welcome
celebrate
free
)";

inline constexpr std::string_view kNrcNegative = R"(
accident
crash
collision
delay
delayed
traffic
jam
congestion
breakdown
broken
damage
danger
dangerous
death
injury
injured
fire
crime
theft
stolen
harassment
fear
angry
anger
hate
bad
terrible
horrible
awful
dirty
disgusting
late
pain
problem
fault
strike
protest
chaos
crowd
crowded
smell
stink
waste
wait
suffer
suffering
complaint
cancel
)";

inline constexpr std::string_view kVaderPositive = R"(
good
great
nice
love
like
awesome
amazing
cool
best
happy
glad
thanks
thank
lol
haha
yay
wow
excellent
perfect
fantastic
smooth
fast
clean
safe
helpful
superb
enjoy
:)
:-)
:d
<3
)";

inline constexpr std::string_view kVaderNegative = R"(
bad
worst
terrible
horrible
awful
hate
sucks
suck
wtf
smh
ugh
meh
fail
failed
angry
annoyed
annoying
sad
slow
late
delayed
dirty
broken
crowded
stuck
useless
pathetic
disgusting
shame
rude
ridiculous
frustrating
frustrated
stupid
:(
:-(
:/
)";

inline constexpr std::string_view kStanfordProxyPositive = R"(
good
great
excellent
nice
love
best
happy
helpful
fast
clean
smooth
safe
comfortable
on time
not bad
no problem
no issues
well done
works fine
thank you
)";

inline constexpr std::string_view kStanfordProxyNegative = R"(
bad
worst
terrible
horrible
awful
poor
slow
late
delayed
dirty
broken
crowded
rude
unsafe
expensive
not good
not working
not happy
no response
no service
never on time
out of order
too late
too slow
too crowded
waste of time
)";

}  // namespace shipped

inline std::unordered_set<std::string> to_set(const std::vector<std::string>& v) {
    return std::unordered_set<std::string>(v.begin(), v.end());
}

inline const std::unordered_set<std::string>& default_stopwords() {
    static const auto words = to_set(parse_word_list(shipped::kStopwords));
    return words;
}

}  // namespace lexboot
