namespace fibrank::psl_data {

// Trimmed snapshot of the publicsuffix.org list: the multi-label suffixes,
// wildcards, and exceptions that show up in news-sharing corpora. Plain
// TLDs are covered by the implicit "*" rule and need no entries. Pass a
// full list file to PublicSuffixList::from_file for complete coverage.
const char* kSnapshot = R"psl(
// ccTLD second-level registrations
co.uk
org.uk
ac.uk
gov.uk
me.uk
net.uk
sch.uk
ltd.uk
plc.uk
nhs.uk
police.uk
com.au
net.au
org.au
edu.au
gov.au
asn.au
id.au
co.nz
net.nz
org.nz
govt.nz
ac.nz
school.nz
geek.nz
gen.nz
kiwi.nz
maori.nz
iwi.nz
co.jp
ne.jp
or.jp
ac.jp
ad.jp
ed.jp
go.jp
gr.jp
lg.jp
com.br
net.br
org.br
gov.br
edu.br
blog.br
jor.br
co.in
net.in
org.in
firm.in
gen.in
ind.in
ac.in
edu.in
res.in
gov.in
mil.in
nic.in
com.cn
net.cn
org.cn
gov.cn
edu.cn
ac.cn
mil.cn
com.mx
net.mx
org.mx
edu.mx
gob.mx
co.za
org.za
net.za
gov.za
ac.za
web.za
edu.za
com.ar
net.ar
org.ar
edu.ar
gob.ar
int.ar
mil.ar
co.kr
ne.kr
or.kr
re.kr
go.kr
ac.kr
pe.kr
mil.kr
com.tr
net.tr
org.tr
edu.tr
gov.tr
bel.tr
pol.tr
com.tw
net.tw
org.tw
edu.tw
gov.tw
idv.tw
com.hk
net.hk
org.hk
edu.hk
gov.hk
idv.hk
com.sg
net.sg
org.sg
edu.sg
gov.sg
per.sg
com.my
net.my
org.my
edu.my
gov.my
co.id
net.id
or.id
ac.id
go.id
web.id
sch.id
my.id
com.ph
net.ph
org.ph
edu.ph
gov.ph
com.vn
net.vn
org.vn
edu.vn
gov.vn
co.th
in.th
or.th
ac.th
go.th
net.th
com.ua
net.ua
org.ua
edu.ua
gov.ua
in.ua
kiev.ua
com.ru
net.ru
org.ru
msk.ru
spb.ru
com.pl
net.pl
org.pl
edu.pl
gov.pl
waw.pl
co.il
net.il
org.il
ac.il
gov.il
muni.il
k12.il
idf.il
com.eg
net.eg
org.eg
edu.eg
gov.eg
sci.eg
com.sa
net.sa
org.sa
edu.sa
gov.sa
med.sa
pub.sa
sch.sa
com.pk
net.pk
org.pk
edu.pk
gov.pk
com.ng
net.ng
org.ng
edu.ng
gov.ng
sch.ng
co.ke
or.ke
ne.ke
go.ke
ac.ke
sc.ke
me.ke
info.ke
com.co
net.co
org.co
edu.co
gov.co
nom.co
mil.co
com.ve
net.ve
org.ve
edu.ve
gob.ve
com.pe
net.pe
org.pe
edu.pe
gob.pe
nom.pe
mil.pe
com.ec
net.ec
org.ec
edu.ec
gob.ec
med.ec
fin.ec
com.uy
net.uy
org.uy
edu.uy
gub.uy
mil.uy
com.py
net.py
org.py
edu.py
gov.py
mil.py
com.bo
net.bo
org.bo
edu.bo
gob.bo
mil.bo
gob.cl
gov.cl
mil.cl
gc.ca
ab.ca
bc.ca
mb.ca
nb.ca
nf.ca
nl.ca
ns.ca
nt.ca
nu.ca
on.ca
pe.ca
qc.ca
sk.ca
yk.ca
asso.fr
gouv.fr
nom.fr
prd.fr
tm.fr
avocat.fr
aeroport.fr
gov.it
edu.it
com.es
nom.es
org.es
gob.es
edu.es
com.pt
edu.pt
gov.pt
int.pt
net.pt
org.pt
publ.pt
com.gr
edu.gr
net.gr
org.gr
gov.gr
com.se
org.se
pp.se
tm.se
ac.at
co.at
gv.at
or.at
priv.at
ac.be
gov.ie
com.mt
edu.mt
net.mt
org.mt
com.cy
org.cy
net.cy
gov.cy
ac.cy
com.lb
edu.lb
gov.lb
net.lb
org.lb
com.jo
net.jo
org.jo
edu.jo
gov.jo
mil.jo
com.kw
net.kw
org.kw
edu.kw
gov.kw
com.qa
net.qa
org.qa
edu.qa
gov.qa
mil.qa
ac.ae
co.ae
com.do
net.do
org.do
edu.do
gob.do
gov.do
mil.do
web.do
com.gt
net.gt
org.gt
edu.gt
gob.gt
mil.gt
com.sv
edu.sv
gob.sv
org.sv
red.sv
com.ni
gob.ni
edu.ni
org.ni
net.ni
mil.ni
co.cr
fi.cr
go.cr
or.cr
sa.cr
ac.cr
com.pa
net.pa
org.pa
edu.pa
gob.pa
sld.pa
com.hn
net.hn
org.hn
edu.hn
gob.hn
mil.hn

// wildcard TLDs and their exceptions
*.bd
*.ck
!www.ck
*.er
*.jm
*.kh
*.mm
*.np
*.pg

// widely used private registries
blogspot.com
wordpress.com
github.io
gitlab.io
herokuapp.com
appspot.com
netlify.app
vercel.app
web.app
firebaseapp.com
azurewebsites.net
pages.dev
cloudfront.net
s3.amazonaws.com
glitch.me
repl.co
)psl";

} // namespace fibrank::psl_data
