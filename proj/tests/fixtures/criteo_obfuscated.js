var a="1822";var b="co_au";var c="crtg_content";function crtg_getCookie(e){var i,x,y,d=document.cookie.split(";");for(i=0;i<d.length;i++){x=d[i].substr(0,d[i].indexOf("="));y=d[i].substr(d[i].indexOf("=")+1);x=x.replace(/^\s+|\s+$/g,"");if(x==e){return unescape(y);}}return "";}
